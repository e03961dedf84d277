#ifndef EXITSPEC_CLI_APP_HPP
#define EXITSPEC_CLI_APP_HPP

namespace exitspec {

/// Command-line entry point. Exit codes: 0 success, 1 hypothesis violation,
/// 2 validation/usage error, 3 numeric failure.
int run_cli(int argc, char** argv);

} // namespace exitspec

#endif

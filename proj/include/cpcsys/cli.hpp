#pragma once

// Command-line front end. Subcommands:
//   build    construct a system from a config or preset, verify the step
//            maps, print stage dimensions and any summability certificate
//   audit    run the configured conditions and write a JSON or CSV report
//   product  estimate a bullet product and print its pushforward
//
// Exit codes: 0 success; 1 audit found failing verdicts; 2 step verification
// failed during build; 3 configuration, expression, or usage errors.
// The CPCAUDIT_THREADS environment variable sets the linear-algebra thread
// count.

#include <iosfwd>

namespace cpcsys {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cpcsys

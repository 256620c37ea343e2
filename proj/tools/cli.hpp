#pragma once

namespace convexsdp::cli {

// Exit codes: 0 optimal, 1 usage or I/O error, 2 solver did not converge.
int run(int argc, char** argv);

}  // namespace convexsdp::cli

#ifndef SATFUSE_CLI_HPP
#define SATFUSE_CLI_HPP

#include <string>
#include <vector>

namespace satfuse::cli {

/// Entry point shared by the binary and the tests. Returns 0 on success,
/// 2 on validation/usage errors, 3 on solver failures.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

} // namespace satfuse::cli

#endif

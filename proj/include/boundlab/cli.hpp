#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace boundlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificateFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parsed command line with every flag resolved, defaults included.
/// Switches hold "true" / "false".
struct CliInvocation {
    std::string subcommand;
    std::map<std::string, std::string> flags;
    std::filesystem::path out_dir;

    bool operator==(const CliInvocation&) const = default;
};

std::vector<std::string> subcommands();

/// args excludes the program name. Throws UsageError.
CliInvocation parse_invocation(std::span<const std::string> args);

/// Canonical argument list that parses back to `inv`.
std::vector<std::string> to_args(const CliInvocation& inv);

/// Text of the config.echo file: "subcommand=<name>" then one
/// "key=value" line per resolved flag in key order.
std::string echo_text(const CliInvocation& inv);
CliInvocation parse_echo(std::string_view text);

/// Runs an already-parsed invocation and writes config.echo into out_dir.
int run(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Parses and runs. Returns 0 on success, 1 on certificate failure, 2 on
/// usage errors (message on `err`).
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace boundlab::cli

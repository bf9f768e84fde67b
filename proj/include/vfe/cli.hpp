#ifndef VFE_CLI_HPP
#define VFE_CLI_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace vfe {

/// Command-line overrides for `check`.
struct CheckCliOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  /// Hidden self-test switch: corrupts a sign inside the semibasic
  /// contraction check, which must then fail with exit code 1.
  bool corrupt_lemma1_sign = false;
};

// Exit codes: 0 success, 1 failed checks, 2 configuration / problem errors.
int cmd_derive(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& config_path, const CheckCliOptions& cli, std::ostream& out,
              std::ostream& err);
int cmd_solve(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_report(const std::string& section_csv, const std::string& config_path, std::ostream& out,
               std::ostream& err);

/// Log verbosity from the VFE_LOG environment variable: quiet < info < debug
/// (default info).
int log_level();

}  // namespace vfe

#endif

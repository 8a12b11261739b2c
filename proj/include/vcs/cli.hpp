#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "vcs/mathcore.hpp"

namespace vcs::cli {

/// Exit codes of the batch tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitFailure = 2;

/// `key = value` lines; '#' starts a comment. Duplicate keys and lines without
/// '=' are rejected with ParameterError naming the line.
using ParamMap = std::map<std::string, std::string>;
ParamMap parse_params(std::istream& in);

/// "re", "re,im" or "(re,im)".
Complex parse_complex(const std::string& text);

enum class Format { Json, Csv };

struct RunConfig {
    std::string command;
    std::string family;
    ParamMap params;
    std::optional<std::size_t> truncation;  ///< level cutoff override
    std::optional<double> tol;
    std::string out;  ///< empty: standard output
    Format format = Format::Json;

    /// Throws ParameterError on a non-positive tolerance or truncation.
    void validate() const;
};

/// Runs one command and writes its report; returns the exit code.
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses the command line (subcommand plus flags) and calls execute.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vcs::cli

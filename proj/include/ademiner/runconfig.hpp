#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ade::cli {

// Defaults shared across subcommands, loadable from a plain `key = value`
// file. Command-line flags always override file values.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<bool> strict_errors;
  std::optional<bool> header;
  std::optional<std::string> scheme;
  std::optional<double> oversample;
  std::optional<double> undersample;
  std::optional<std::string> mode;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<double> l2;
  std::optional<std::uint32_t> feature_dim;
  std::optional<int> batch_size;
  std::optional<std::string> user_token;
  std::optional<std::string> url_token;
  std::optional<std::string> emoji_mode;
  std::optional<std::string> strip_mode;
};

// Lines of `key = value`; blank lines and lines starting with '#' are
// ignored. Unknown keys and unparsable values are errors with line numbers.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace ade::cli

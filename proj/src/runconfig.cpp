#include "ademiner/runconfig.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ademiner/error.hpp"

namespace ade::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& origin, std::size_t line_no) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    fail(origin + ":" + std::to_string(line_no) + ": unparsable value '" + value + "'");
  return out;
}

bool parse_bool(const std::string& value, const std::string& origin, std::size_t line_no) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(origin + ":" + std::to_string(line_no) + ": unparsable boolean '" + value + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos)
      fail(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(origin + ":" + std::to_string(line_no) + ": empty key");

    if (key == "seed")
      config.seed = parse_number<std::uint64_t>(value, origin, line_no);
    else if (key == "jobs")
      config.jobs = parse_number<int>(value, origin, line_no);
    else if (key == "strict_errors")
      config.strict_errors = parse_bool(value, origin, line_no);
    else if (key == "header")
      config.header = parse_bool(value, origin, line_no);
    else if (key == "scheme")
      config.scheme = value;
    else if (key == "oversample")
      config.oversample = parse_number<double>(value, origin, line_no);
    else if (key == "undersample")
      config.undersample = parse_number<double>(value, origin, line_no);
    else if (key == "mode")
      config.mode = value;
    else if (key == "epochs")
      config.epochs = parse_number<int>(value, origin, line_no);
    else if (key == "learning_rate")
      config.learning_rate = parse_number<double>(value, origin, line_no);
    else if (key == "l2")
      config.l2 = parse_number<double>(value, origin, line_no);
    else if (key == "feature_dim")
      config.feature_dim = parse_number<std::uint32_t>(value, origin, line_no);
    else if (key == "batch_size")
      config.batch_size = parse_number<int>(value, origin, line_no);
    else if (key == "user_token")
      config.user_token = value;
    else if (key == "url_token")
      config.url_token = value;
    else if (key == "emoji_mode")
      config.emoji_mode = value;
    else if (key == "strip_mode")
      config.strip_mode = value;
    else
      fail(origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace ade::cli

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ademiner/corpus.hpp"

namespace ade::norm {

enum class EmojiMode { Keep, Demojize };
enum class StripMode { None, StripEntities };

struct NormalizationConfig {
  std::string user_token = "@USER";
  std::string url_token = "HTTPURL";
  EmojiMode emoji_mode = EmojiMode::Keep;
  StripMode strip_mode = StripMode::None;
};

// Throws when user_token/url_token are empty or contain tab/newline.
void validate_config(const NormalizationConfig& config);

// A segment either copies a source range verbatim or replaces it (deletion =
// replacement by the empty string). Coordinates are scalar-value indices.
struct MapSegment {
  std::size_t source_start = 0;
  std::size_t source_end = 0;
  std::size_t target_start = 0;
  std::size_t target_end = 0;
  bool copied = true;
  bool operator==(const MapSegment&) const = default;
};

// Segments tile both the source and the target text, sorted in both
// coordinate systems. No insertion segments: every segment consumes source.
struct OffsetMap {
  std::vector<MapSegment> segments;
  bool operator==(const OffsetMap&) const = default;

  static OffsetMap identity(std::size_t length);
  bool is_identity() const;
  // Swap coordinate systems (valid because segments tile both sides).
  OffsetMap inverted() const;
  std::size_t source_length() const;
  std::size_t target_length() const;
};

struct NormalizedTweet {
  std::string tweet_id;
  std::string text;
  OffsetMap offset_map;
};

// Emoji alias table: scalar sequence -> alias (without the colons).
class EmojiTable {
 public:
  void add(const std::u32string& sequence, const std::string& alias);
  // Longest-match lookup at scalars[pos]; returns matched length (0 = none).
  std::size_t match(const std::vector<char32_t>& scalars, std::size_t pos,
                    const std::string** alias) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::u32string, std::string> table_;
  std::size_t max_len_ = 0;
};

// TSV `hex-codepoint-sequence<TAB>alias`, '#' comment lines ignored.
EmojiTable load_emoji_table(const std::string& path);
const EmojiTable& default_emoji_table();

// Applies the config's substitutions (mention -> user_token, URL ->
// url_token; or entity stripping when strip_mode says so), then emoji
// handling, and records every rewrite in the OffsetMap.
NormalizedTweet normalize_tweet(const corpus::Tweet& tweet, const NormalizationConfig& config,
                                const EmojiTable* table = nullptr);

// Replaces each mapped emoji sequence by :alias:; unmapped characters pass
// through untouched.
std::string demojize(const std::string& text, const EmojiTable* table = nullptr);

// Deletes mention/hashtag/URL tokens plus one adjacent space.
NormalizedTweet strip_entities(const corpus::Tweet& tweet);

struct Projection {
  std::optional<corpus::SpanAnnotation> span;  // empty = dropped
  double replaced_fraction = 0.0;              // overlap with rewritten regions
};

// Rewrites a source-coordinate span into target coordinates; drops it when
// it intersects a replaced/deleted region. The surface field of the result
// is left empty (callers slice the target text).
Projection project_span(const OffsetMap& map, const corpus::SpanAnnotation& span);

}  // namespace ade::norm

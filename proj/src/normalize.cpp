#include "ademiner/normalize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ademiner/error.hpp"
#include "ademiner/unicode.hpp"
#include "emoji_table_data.hpp"

namespace ade::norm {

namespace {

// A pending rewrite of source scalars [start, end) by `replacement`.
struct Edit {
  std::size_t start;
  std::size_t end;
  std::string replacement;
};

bool is_token_start(const std::vector<char32_t>& s, std::size_t pos) {
  return !uni::is_space(s[pos]) && (pos == 0 || uni::is_space(s[pos - 1]));
}

bool has_prefix(const std::vector<char32_t>& s, std::size_t pos, const char* prefix) {
  for (std::size_t i = 0; prefix[i] != '\0'; ++i) {
    if (pos + i >= s.size() || s[pos + i] != static_cast<char32_t>(prefix[i])) return false;
  }
  return true;
}

// URL = whitespace-delimited token starting with http:// https:// or www.
// The whole token (up to whitespace) is the match.
bool match_url(const std::vector<char32_t>& s, std::size_t pos, std::size_t& end) {
  if (!is_token_start(s, pos)) return false;
  if (!has_prefix(s, pos, "http://") && !has_prefix(s, pos, "https://") &&
      !has_prefix(s, pos, "www."))
    return false;
  end = pos;
  while (end < s.size() && !uni::is_space(s[end])) ++end;
  return true;
}

// Mention/hashtag = sigil followed by a maximal run of >=1 word characters.
bool match_sigil_run(const std::vector<char32_t>& s, std::size_t pos, char32_t sigil,
                     std::size_t& end) {
  if (s[pos] != sigil || pos + 1 >= s.size() || !uni::is_word_char(s[pos + 1])) return false;
  end = pos + 1;
  while (end < s.size() && uni::is_word_char(s[end])) ++end;
  return true;
}

std::vector<Edit> collect_entity_edits(const std::vector<char32_t>& s,
                                       const NormalizationConfig& config) {
  std::vector<Edit> edits;
  bool strip = config.strip_mode == StripMode::StripEntities;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = 0;
    if (match_url(s, pos, end)) {
      edits.push_back({pos, end, strip ? std::string() : config.url_token});
      pos = end;
    } else if (match_sigil_run(s, pos, U'@', end)) {
      edits.push_back({pos, end, strip ? std::string() : config.user_token});
      pos = end;
    } else if (strip && match_sigil_run(s, pos, U'#', end)) {
      edits.push_back({pos, end, std::string()});
      pos = end;
    } else {
      ++pos;
    }
  }
  if (strip) {
    // Each deletion also swallows one adjacent space: the one before it when
    // free, else the one after.
    for (std::size_t i = 0; i < edits.size(); ++i) {
      auto& e = edits[i];
      std::size_t prev_end = i == 0 ? 0 : edits[i - 1].end;
      if (e.start > 0 && s[e.start - 1] == U' ' && e.start - 1 >= prev_end) {
        --e.start;
      } else if (e.end < s.size() && s[e.end] == U' ') {
        ++e.end;
      }
    }
  }
  return edits;
}

void add_emoji_edits(const std::vector<char32_t>& s, const EmojiTable& table,
                     std::vector<Edit>& edits) {
  // Scan the gaps between existing edits; entity matches never end inside an
  // emoji sequence, so gap-local scanning is complete.
  std::vector<Edit> emoji;
  std::size_t pos = 0;
  std::size_t next_edit = 0;
  while (pos < s.size()) {
    if (next_edit < edits.size() && pos >= edits[next_edit].start) {
      pos = edits[next_edit].end;
      ++next_edit;
      continue;
    }
    std::size_t limit = next_edit < edits.size() ? edits[next_edit].start : s.size();
    const std::string* alias = nullptr;
    std::size_t len = table.match(s, pos, &alias);
    if (len > 0 && pos + len <= limit) {
      emoji.push_back({pos, pos + len, ":" + *alias + ":"});
      pos += len;
    } else {
      ++pos;
    }
  }
  edits.insert(edits.end(), emoji.begin(), emoji.end());
  std::sort(edits.begin(), edits.end(),
            [](const Edit& a, const Edit& b) { return a.start < b.start; });
}

NormalizedTweet apply_edits(const corpus::Tweet& tweet, const std::vector<char32_t>& s,
                            const std::vector<Edit>& edits) {
  NormalizedTweet out;
  out.tweet_id = tweet.id;
  std::string text;
  std::size_t src = 0;
  std::size_t tgt = 0;
  auto copy_through = [&](std::size_t until) {
    if (until == src) return;
    MapSegment seg{src, until, tgt, tgt + (until - src), true};
    for (std::size_t i = src; i < until; ++i) uni::append_utf8(text, s[i]);
    tgt = seg.target_end;
    src = until;
    out.offset_map.segments.push_back(seg);
  };
  for (const auto& e : edits) {
    copy_through(e.start);
    std::string source_text;
    for (std::size_t i = e.start; i < e.end; ++i) uni::append_utf8(source_text, s[i]);
    std::size_t rlen = uni::scalar_length(e.replacement);
    // A substitution that reproduces its input is recorded as a copy, so
    // repeated normalization yields an identity-equivalent map.
    bool copied = e.replacement == source_text;
    out.offset_map.segments.push_back({e.start, e.end, tgt, tgt + rlen, copied});
    text += e.replacement;
    tgt += rlen;
    src = e.end;
  }
  copy_through(s.size());
  out.text = std::move(text);
  return out;
}

EmojiTable parse_emoji_tsv(std::istream& in, const std::string& origin) {
  EmojiTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      fail(origin + ":" + std::to_string(line_no) + ": expected 'codepoints<TAB>alias'");
    std::u32string seq;
    std::stringstream cps(line.substr(0, tab));
    std::string hex;
    while (std::getline(cps, hex, '-')) {
      if (hex.empty()) fail(origin + ":" + std::to_string(line_no) + ": empty codepoint");
      char32_t cp = 0;
      for (char c : hex) {
        int digit;
        if (c >= '0' && c <= '9')
          digit = c - '0';
        else if (c >= 'a' && c <= 'f')
          digit = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
          digit = c - 'A' + 10;
        else
          fail(origin + ":" + std::to_string(line_no) + ": bad hex codepoint '" + hex + "'");
        cp = cp * 16 + static_cast<char32_t>(digit);
      }
      if (cp > 0x10FFFF)
        fail(origin + ":" + std::to_string(line_no) + ": codepoint out of range");
      seq.push_back(cp);
    }
    table.add(seq, line.substr(tab + 1));
  }
  return table;
}

}  // namespace

void validate_config(const NormalizationConfig& config) {
  for (const auto* token : {&config.user_token, &config.url_token}) {
    if (token->empty()) fail("normalization tokens must be non-empty");
    if (token->find('\t') != std::string::npos || token->find('\n') != std::string::npos)
      fail("normalization tokens must not contain tab or newline");
  }
}

OffsetMap OffsetMap::identity(std::size_t length) {
  OffsetMap map;
  if (length > 0) map.segments.push_back({0, length, 0, length, true});
  return map;
}

bool OffsetMap::is_identity() const {
  for (const auto& seg : segments)
    if (!seg.copied || seg.source_start != seg.target_start || seg.source_end != seg.target_end)
      return false;
  return true;
}

OffsetMap OffsetMap::inverted() const {
  OffsetMap out;
  out.segments.reserve(segments.size());
  for (const auto& seg : segments)
    out.segments.push_back({seg.target_start, seg.target_end, seg.source_start, seg.source_end,
                            seg.copied});
  return out;
}

std::size_t OffsetMap::source_length() const {
  return segments.empty() ? 0 : segments.back().source_end;
}

std::size_t OffsetMap::target_length() const {
  return segments.empty() ? 0 : segments.back().target_end;
}

void EmojiTable::add(const std::u32string& sequence, const std::string& alias) {
  if (sequence.empty()) fail("empty emoji sequence");
  table_[sequence] = alias;
  max_len_ = std::max(max_len_, sequence.size());
}

std::size_t EmojiTable::match(const std::vector<char32_t>& scalars, std::size_t pos,
                              const std::string** alias) const {
  std::size_t cap = std::min(max_len_, scalars.size() - pos);
  for (std::size_t len = cap; len >= 1; --len) {
    std::u32string key(scalars.begin() + static_cast<std::ptrdiff_t>(pos),
                       scalars.begin() + static_cast<std::ptrdiff_t>(pos + len));
    auto it = table_.find(key);
    if (it != table_.end()) {
      *alias = &it->second;
      return len;
    }
  }
  return 0;
}

EmojiTable load_emoji_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  return parse_emoji_tsv(in, path);
}

const EmojiTable& default_emoji_table() {
  static const EmojiTable table = [] {
    std::istringstream in(kDefaultEmojiTableTsv);
    return parse_emoji_tsv(in, "<builtin emoji table>");
  }();
  return table;
}

NormalizedTweet normalize_tweet(const corpus::Tweet& tweet, const NormalizationConfig& config,
                                const EmojiTable* table) {
  validate_config(config);
  auto scalars = uni::decode_utf8(tweet.text);
  auto edits = collect_entity_edits(scalars, config);
  if (config.emoji_mode == EmojiMode::Demojize)
    add_emoji_edits(scalars, table ? *table : default_emoji_table(), edits);
  return apply_edits(tweet, scalars, edits);
}

std::string demojize(const std::string& text, const EmojiTable* table) {
  auto scalars = uni::decode_utf8(text);
  std::vector<Edit> edits;
  add_emoji_edits(scalars, table ? *table : default_emoji_table(), edits);
  return apply_edits({"", text}, scalars, edits).text;
}

NormalizedTweet strip_entities(const corpus::Tweet& tweet) {
  NormalizationConfig config;
  config.strip_mode = StripMode::StripEntities;
  return normalize_tweet(tweet, config);
}

Projection project_span(const OffsetMap& map, const corpus::SpanAnnotation& span) {
  if (span.start >= span.end) fail("invalid span: start must be < end");
  if (span.end > map.source_length())
    fail("span (" + std::to_string(span.start) + "," + std::to_string(span.end) +
         ") exceeds mapped source length " + std::to_string(map.source_length()));

  std::size_t replaced = 0;
  const MapSegment* first = nullptr;
  const MapSegment* last = nullptr;
  for (const auto& seg : map.segments) {
    if (seg.source_start >= span.end) break;
    if (seg.source_end <= span.start) continue;
    if (!seg.copied) {
      replaced += std::min(span.end, seg.source_end) - std::max(span.start, seg.source_start);
    } else {
      if (!first) first = &seg;
      last = &seg;
    }
  }
  Projection out;
  if (replaced > 0 || !first) {
    out.replaced_fraction = static_cast<double>(replaced) / static_cast<double>(span.end - span.start);
    return out;
  }
  corpus::SpanAnnotation projected;
  projected.tweet_id = span.tweet_id;
  projected.start = first->target_start + (span.start - first->source_start);
  projected.end = last->target_start + (span.end - last->source_start);
  out.span = projected;
  return out;
}

}  // namespace ade::norm

#include "ademiner/tokenize.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ademiner/error.hpp"
#include "ademiner/unicode.hpp"

namespace ade::bpe {

namespace {

bool is_punct(char32_t c) {
  return !uni::is_space(c) && !uni::is_letter(c) && !uni::is_number(c);
}

// Symbols of a piece being merged; byte_len tracks how many source bytes
// each symbol covers (one per base character before any merge).
struct Symbol {
  std::string text;
  std::size_t byte_len;
};

}  // namespace

ByteEncoder::ByteEncoder() {
  // Printable ranges keep their own codepoint; everything else is assigned
  // 256+n in increasing byte order.
  std::array<bool, 256> printable{};
  for (int b = 33; b <= 126; ++b) printable[b] = true;
  for (int b = 161; b <= 172; ++b) printable[b] = true;
  for (int b = 174; b <= 255; ++b) printable[b] = true;
  char32_t next = 256;
  for (int b = 0; b < 256; ++b) {
    char32_t c = printable[b] ? static_cast<char32_t>(b) : next++;
    byte_to_char_[b] = c;
    char_to_byte_[c] = static_cast<std::uint8_t>(b);
  }
}

int ByteEncoder::to_byte(char32_t c) const {
  auto it = char_to_byte_.find(c);
  return it == char_to_byte_.end() ? -1 : it->second;
}

const ByteEncoder& byte_encoder() {
  static const ByteEncoder enc;
  return enc;
}

std::vector<std::pair<std::size_t, std::size_t>> pre_tokenize(const std::string& text) {
  auto s = uni::decode_utf8(text);
  auto byte_of = uni::scalar_byte_offsets(s);
  std::vector<std::pair<std::size_t, std::size_t>> pieces;
  auto emit = [&](std::size_t from, std::size_t to) {
    pieces.emplace_back(byte_of[from], byte_of[to]);
  };

  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    // Contractions ('s 't 're 've 'm 'll 'd), tried first like the
    // reference pattern; lowercase only.
    if (s[i] == U'\'') {
      static constexpr const char* kSuffixes[] = {"s", "t", "re", "ve", "m", "ll", "d"};
      std::size_t matched = 0;
      for (const char* suf : kSuffixes) {
        std::size_t len = std::char_traits<char>::length(suf);
        if (i + 1 + len <= n) {
          bool ok = true;
          for (std::size_t k = 0; k < len; ++k)
            if (s[i + 1 + k] != static_cast<char32_t>(suf[k])) {
              ok = false;
              break;
            }
          if (ok) {
            matched = 1 + len;
            break;
          }
        }
      }
      if (matched > 0) {
        emit(i, i + matched);
        i += matched;
        continue;
      }
    }
    // Optionally space-prefixed letter / number / punctuation runs.
    auto run = [&](bool (*pred)(char32_t)) -> std::size_t {
      std::size_t j = i;
      if (s[j] == U' ' && j + 1 < n && pred(s[j + 1])) ++j;
      if (j < n && pred(s[j])) {
        while (j < n && pred(s[j])) ++j;
        return j;
      }
      return 0;
    };
    if (std::size_t end = run(uni::is_letter); end != 0) {
      emit(i, end);
      i = end;
      continue;
    }
    if (std::size_t end = run(uni::is_number); end != 0) {
      emit(i, end);
      i = end;
      continue;
    }
    if (std::size_t end = run(is_punct); end != 0) {
      emit(i, end);
      i = end;
      continue;
    }
    // Whitespace: keep the last char of a run for the following piece's
    // optional space, unless the run extends to end of text.
    std::size_t k = i;
    while (k < n && uni::is_space(s[k])) ++k;
    if (k == n || k - i == 1) {
      emit(i, k == n ? k : i + 1);
      i = (k == n) ? k : i + 1;
    } else {
      emit(i, k - 1);
      i = k - 1;
    }
  }
  return pieces;
}

BpeVocab make_vocab(const std::vector<std::pair<std::string, int>>& tokens,
                    const std::vector<std::pair<std::string, std::string>>& merges) {
  BpeVocab vocab;
  for (const auto& [token, id] : tokens) {
    if (!vocab.token_to_id.emplace(token, id).second) fail("duplicate token '" + token + "'");
    if (!vocab.id_to_token.emplace(id, token).second)
      fail("id collision: id " + std::to_string(id) + " assigned to both '" +
           vocab.id_to_token[id] + "' and '" + token + "'");
  }
  vocab.merges = merges;
  for (std::size_t rank = 0; rank < merges.size(); ++rank) {
    if (!vocab.merge_rank.emplace(merges[rank], static_cast<std::uint32_t>(rank)).second)
      fail("duplicate merge pair '" + merges[rank].first + " " + merges[rank].second + "'");
  }
  return vocab;
}

BpeVocab make_byte_vocab() {
  const auto& enc = byte_encoder();
  std::vector<std::pair<std::string, int>> tokens;
  tokens.reserve(256);
  for (int b = 0; b < 256; ++b) {
    std::string t;
    uni::append_utf8(t, enc.to_char(static_cast<std::uint8_t>(b)));
    tokens.emplace_back(t, b);
  }
  return make_vocab(tokens, {});
}

BpeVocab load_vocab(const std::string& vocab_path, const std::string& merges_path) {
  std::ifstream in(vocab_path, std::ios::binary);
  if (!in) fail("cannot open " + vocab_path);

  // nlohmann silently keeps one value per duplicate key, so duplicates are
  // caught through the parser callback.
  std::vector<std::string> dup;
  std::unordered_map<std::string, int> seen;
  nlohmann::json::parser_callback_t cb = [&](int depth, nlohmann::json::parse_event_t event,
                                             nlohmann::json& parsed) {
    if (depth == 1 && event == nlohmann::json::parse_event_t::key) {
      auto key = parsed.get<std::string>();
      if (++seen[key] == 2) dup.push_back(key);
    }
    return true;
  };
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, cb);
  } catch (const nlohmann::json::exception& e) {
    fail(vocab_path + ": " + e.what());
  }
  if (!dup.empty()) fail(vocab_path + ": duplicate token '" + dup.front() + "'");
  if (!doc.is_object()) fail(vocab_path + ": expected a JSON object of token -> id");

  std::vector<std::pair<std::string, int>> tokens;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_number_integer())
      fail(vocab_path + ": id for token '" + it.key() + "' is not an integer");
    tokens.emplace_back(it.key(), it.value().get<int>());
  }

  std::vector<std::pair<std::string, std::string>> merges;
  std::ifstream min(merges_path, std::ios::binary);
  if (!min) fail("cannot open " + merges_path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(min, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && !line.empty() && line[0] == '#') continue;
    if (line.empty()) continue;
    auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size() ||
        line.find(' ', sp + 1) != std::string::npos)
      fail(merges_path + ":" + std::to_string(line_no) +
           ": malformed merge, expected exactly two space-separated symbols");
    merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
  }
  return make_vocab(tokens, merges);
}

void save_vocab(const BpeVocab& vocab, const std::string& vocab_path,
                const std::string& merges_path) {
  std::vector<std::pair<int, std::string>> by_id;
  by_id.reserve(vocab.id_to_token.size());
  for (const auto& [id, token] : vocab.id_to_token) by_id.emplace_back(id, token);
  std::sort(by_id.begin(), by_id.end());
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [id, token] : by_id) doc[token] = id;
  std::ofstream out(vocab_path, std::ios::binary);
  if (!out) fail("cannot write " + vocab_path);
  out << doc.dump() << '\n';

  std::ofstream mout(merges_path, std::ios::binary);
  if (!mout) fail("cannot write " + merges_path);
  mout << "#version: 0.2\n";
  for (const auto& [left, right] : vocab.merges) mout << left << ' ' << right << '\n';
}

TokenSequence encode(const std::string& text, const BpeVocab& vocab) {
  const auto& enc = byte_encoder();
  TokenSequence seq;
  for (auto [piece_start, piece_end] : pre_tokenize(text)) {
    std::vector<Symbol> symbols;
    symbols.reserve(piece_end - piece_start);
    for (std::size_t b = piece_start; b < piece_end; ++b) {
      std::string sym;
      uni::append_utf8(sym, enc.to_char(static_cast<std::uint8_t>(text[b])));
      symbols.push_back({std::move(sym), 1});
    }
    // Repeatedly apply the lowest-ranked pair present; a single left-to-right
    // sweep merges its occurrences leftmost-first.
    while (symbols.size() >= 2) {
      std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        auto it = vocab.merge_rank.find({symbols[i].text, symbols[i + 1].text});
        if (it != vocab.merge_rank.end() && it->second < best) best = it->second;
      }
      if (best == std::numeric_limits<std::uint32_t>::max()) break;
      const auto& [left, right] = vocab.merges[best];
      std::vector<Symbol> merged;
      merged.reserve(symbols.size());
      std::size_t i = 0;
      while (i < symbols.size()) {
        if (i + 1 < symbols.size() && symbols[i].text == left && symbols[i + 1].text == right) {
          merged.push_back({left + right, symbols[i].byte_len + symbols[i + 1].byte_len});
          i += 2;
        } else {
          merged.push_back(std::move(symbols[i]));
          ++i;
        }
      }
      symbols = std::move(merged);
    }
    std::size_t pos = piece_start;
    for (const auto& sym : symbols) {
      auto it = vocab.token_to_id.find(sym.text);
      if (it == vocab.token_to_id.end())
        fail("unknown symbol '" + sym.text + "' while encoding piece '" +
             text.substr(piece_start, piece_end - piece_start) + "'");
      seq.ids.push_back(it->second);
      seq.offsets.emplace_back(pos, pos + sym.byte_len);
      pos += sym.byte_len;
    }
  }
  return seq;
}

std::string decode_ids(const std::vector<int>& ids, const BpeVocab& vocab) {
  const auto& enc = byte_encoder();
  std::string chars;
  for (int id : ids) {
    auto it = vocab.id_to_token.find(id);
    if (it == vocab.id_to_token.end()) fail("unknown token id " + std::to_string(id));
    chars += it->second;
  }
  std::string bytes;
  for (char32_t c : uni::decode_utf8(chars)) {
    int b = enc.to_byte(c);
    if (b < 0) fail("token text contains a character outside the byte map");
    bytes.push_back(static_cast<char>(b));
  }
  bool ok = false;
  uni::decode_utf8(bytes, ok);
  if (!ok) fail("decoded byte stream is not valid UTF-8");
  return bytes;
}

std::string decode(const TokenSequence& seq, const BpeVocab& vocab) {
  return decode_ids(seq.ids, vocab);
}

char bio_tag_char(BioTag tag) {
  switch (tag) {
    case BioTag::B: return 'B';
    case BioTag::I: return 'I';
    default: return 'O';
  }
}

BioTags align_spans_to_bio(const TokenSequence& seq,
                           const std::vector<corpus::SpanAnnotation>& spans,
                           const std::string& text) {
  auto scalars = uni::decode_utf8(text);
  auto byte_of = uni::scalar_byte_offsets(scalars);

  std::vector<const corpus::SpanAnnotation*> ordered;
  ordered.reserve(spans.size());
  for (const auto& s : spans) {
    if (s.start >= s.end || s.end > scalars.size())
      fail("span (" + std::to_string(s.start) + "," + std::to_string(s.end) +
           ") out of bounds for text of length " + std::to_string(scalars.size()));
    ordered.push_back(&s);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const corpus::SpanAnnotation* a, const corpus::SpanAnnotation* b) {
              return a->start < b->start || (a->start == b->start && a->end < b->end);
            });
  for (std::size_t i = 1; i < ordered.size(); ++i)
    if (ordered[i]->start < ordered[i - 1]->end)
      fail("overlapping input spans (" + std::to_string(ordered[i - 1]->start) + "," +
           std::to_string(ordered[i - 1]->end) + ") and (" + std::to_string(ordered[i]->start) +
           "," + std::to_string(ordered[i]->end) + ")");

  BioTags out;
  out.tags.assign(seq.size(), BioTag::O);
  for (const auto* span : ordered) {
    std::size_t sb = byte_of[span->start];
    std::size_t se = byte_of[span->end];
    bool first = true;
    for (std::size_t k = 0; k < seq.size(); ++k) {
      auto [bs, be] = seq.offsets[k];
      if (bs >= se) break;
      if (be <= sb) continue;
      out.tags[k] = first ? BioTag::B : BioTag::I;
      first = false;
    }
  }
  return out;
}

}  // namespace ade::bpe

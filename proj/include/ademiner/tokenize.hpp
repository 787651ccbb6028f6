#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ademiner/corpus.hpp"

namespace ade::bpe {

// Bijection between the 256 byte values and printable Unicode scalars, as
// used by byte-level BPE: printable ASCII and Latin-1 map to themselves,
// the rest to 256+n in increasing byte order.
class ByteEncoder {
 public:
  ByteEncoder();
  char32_t to_char(std::uint8_t byte) const { return byte_to_char_[byte]; }
  // -1 when the scalar is not in the image of the byte map.
  int to_byte(char32_t c) const;

 private:
  std::array<char32_t, 256> byte_to_char_;
  std::unordered_map<char32_t, std::uint8_t> char_to_byte_;
};

// Shared immutable instance.
const ByteEncoder& byte_encoder();

struct PairHash {
  std::size_t operator()(const std::pair<std::string, std::string>& p) const {
    std::size_t h = std::hash<std::string>()(p.first);
    return h ^ (std::hash<std::string>()(p.second) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};

struct BpeVocab {
  std::unordered_map<std::string, int> token_to_id;
  std::unordered_map<int, std::string> id_to_token;
  std::vector<std::pair<std::string, std::string>> merges;  // index = rank
  std::unordered_map<std::pair<std::string, std::string>, std::uint32_t, PairHash> merge_rank;

  std::size_t size() const { return token_to_id.size(); }
};

// vocab: JSON object token -> id. merges: one merge per line as two
// space-separated symbols; a first line starting with '#' is skipped.
BpeVocab load_vocab(const std::string& vocab_path, const std::string& merges_path);

// Builds a vocab directly (id collisions / duplicate merges rejected).
BpeVocab make_vocab(const std::vector<std::pair<std::string, int>>& tokens,
                    const std::vector<std::pair<std::string, std::string>>& merges);

// The 256-token base vocabulary (id = byte value) with no merges; encodes
// any UTF-8 input and round-trips exactly.
BpeVocab make_byte_vocab();

void save_vocab(const BpeVocab& vocab, const std::string& vocab_path,
                const std::string& merges_path);

struct TokenSequence {
  std::vector<int> ids;
  // Byte ranges into the UTF-8 source text; sorted, non-overlapping, tiling
  // [0, byte_length) exactly.
  std::vector<std::pair<std::size_t, std::size_t>> offsets;

  std::size_t size() const { return ids.size(); }
  bool operator==(const TokenSequence&) const = default;
};

// GPT-2 style pre-tokenization: contractions, optionally space-prefixed
// letter/digit/punctuation runs, whitespace runs. Pieces tile the text.
// Returned as (byte_start, byte_end) ranges.
std::vector<std::pair<std::size_t, std::size_t>> pre_tokenize(const std::string& text);

// Byte-level BPE encode: pre-split, byte-map each piece, then repeatedly
// apply the lowest-ranked applicable merge (leftmost occurrence first).
TokenSequence encode(const std::string& text, const BpeVocab& vocab);

std::string decode(const TokenSequence& seq, const BpeVocab& vocab);
std::string decode_ids(const std::vector<int>& ids, const BpeVocab& vocab);

enum class BioTag : std::uint8_t { O = 0, B = 1, I = 2 };

struct BioTags {
  std::vector<BioTag> tags;
  bool operator==(const BioTags&) const = default;
};

char bio_tag_char(BioTag tag);

// Token <-> span alignment: a token is inside a span iff its byte range
// overlaps the span's byte range (spans arrive in scalar-value coordinates
// and are converted first). Input spans must be mutually non-overlapping.
BioTags align_spans_to_bio(const TokenSequence& seq,
                           const std::vector<corpus::SpanAnnotation>& spans,
                           const std::string& text);

}  // namespace ade::bpe

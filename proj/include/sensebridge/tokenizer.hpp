#ifndef SENSEBRIDGE_TOKENIZER_HPP
#define SENSEBRIDGE_TOKENIZER_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sensebridge {

// Vocabulary-free tokenizer: lowercased whitespace tokens hashed into a fixed
// number of buckets. Id 0 is reserved for the example/gloss separator.
class HashTokenizer {
public:
    static constexpr std::uint32_t kSeparatorId = 0;

    explicit HashTokenizer(std::size_t vocab_size);

    std::size_t vocab_size() const { return vocab_size_; }

    std::uint32_t token_id(std::string_view token) const;

    // Ids for a plain text, truncated to max_len.
    std::vector<std::uint32_t> encode_text(std::string_view text, std::size_t max_len) const;

    // Ids for "example<TAB>gloss" with the separator id in between. When the
    // pair exceeds max_len the example side is truncated first (from its
    // right), keeping the gloss whole; an oversized gloss is cut only after
    // the example has been reduced to a single token.
    std::vector<std::uint32_t> encode_pair_text(std::string_view pair_text,
                                                std::size_t max_len) const;

private:
    std::size_t vocab_size_;
};

} // namespace sensebridge

#endif

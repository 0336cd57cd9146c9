#include "sensebridge/tokenizer.hpp"

#include "sensebridge/error.hpp"
#include "sensebridge/text.hpp"

namespace sensebridge {

HashTokenizer::HashTokenizer(std::size_t vocab_size) : vocab_size_(vocab_size) {
    if (vocab_size < 2) throw UsageError("tokenizer needs at least 2 ids");
}

std::uint32_t HashTokenizer::token_id(std::string_view token) const {
    return 1u + static_cast<std::uint32_t>(fnv1a(token) % (vocab_size_ - 1));
}

std::vector<std::uint32_t> HashTokenizer::encode_text(std::string_view text,
                                                      std::size_t max_len) const {
    std::vector<std::uint32_t> ids;
    for (const auto& token : whitespace_tokens(lowercase(text))) {
        if (ids.size() >= max_len) break;
        ids.push_back(token_id(token));
    }
    return ids;
}

std::vector<std::uint32_t> HashTokenizer::encode_pair_text(std::string_view pair_text,
                                                           std::size_t max_len) const {
    const std::size_t tab = pair_text.find('\t');
    if (tab == std::string_view::npos) {
        throw UsageError("pair text has no tab delimiter");
    }
    std::vector<std::uint32_t> example;
    for (const auto& token : whitespace_tokens(lowercase(pair_text.substr(0, tab)))) {
        example.push_back(token_id(token));
    }
    std::vector<std::uint32_t> gloss;
    for (const auto& token : whitespace_tokens(lowercase(pair_text.substr(tab + 1)))) {
        gloss.push_back(token_id(token));
    }

    if (max_len < 3) throw UsageError("max_len must fit example, separator and gloss");
    if (example.size() + 1 + gloss.size() > max_len) {
        std::size_t example_budget =
            max_len > gloss.size() + 1 ? max_len - gloss.size() - 1 : 1;
        if (example_budget < 1) example_budget = 1;
        if (example.size() > example_budget) example.resize(example_budget);
        std::size_t gloss_budget = max_len - example.size() - 1;
        if (gloss.size() > gloss_budget) gloss.resize(gloss_budget);
    }

    std::vector<std::uint32_t> ids;
    ids.reserve(example.size() + 1 + gloss.size());
    ids.insert(ids.end(), example.begin(), example.end());
    ids.push_back(kSeparatorId);
    ids.insert(ids.end(), gloss.begin(), gloss.end());
    return ids;
}

} // namespace sensebridge

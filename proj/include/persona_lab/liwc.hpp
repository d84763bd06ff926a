#pragma once

#include "persona_lab/persona.hpp"
#include "persona_lab/records.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace persona_lab {

struct LiwcCategory {
    int id = 0;
    std::string name;

    bool operator==(const LiwcCategory &) const = default;
};

/// A parsed LIWC-2007 style lexicon. Literal words take priority; otherwise a
/// token is credited to the longest wildcard stem that prefixes it.
class LiwcDictionary {
  public:
    /// Categories in ascending id order; this is also the column order of every vector.
    [[nodiscard]] const std::vector<LiwcCategory> &categories() const noexcept { return categories_; }
    [[nodiscard]] std::optional<std::size_t> column_of(int category_id) const;

    [[nodiscard]] const std::map<std::string, std::vector<int>, std::less<>> &literals() const noexcept { return literals_; }
    /// Stems with the trailing '*' removed.
    [[nodiscard]] const std::map<std::string, std::vector<int>> &stems() const noexcept { return stems_; }

    /// Categories a token is credited to, empty when it matches nothing.
    [[nodiscard]] std::span<const int> lookup(std::string_view token) const;

    /// Conditional annotations such as "(02 134)126" that were skipped while parsing.
    [[nodiscard]] std::size_t skipped_annotations() const noexcept { return skipped_annotations_; }

  private:
    friend LiwcDictionary parse_dic(std::string_view text);

    void add_entry(const std::string &word, std::vector<int> ids, bool stem);
    void build_trie();

    struct TrieNode {
        std::vector<std::pair<char, std::uint32_t>> children; // sorted by char
        std::vector<int> categories;                          // non-empty on stem ends
    };

    std::vector<LiwcCategory> categories_;
    std::map<std::string, std::vector<int>, std::less<>> literals_;
    std::map<std::string, std::vector<int>> stems_;
    std::vector<TrieNode> trie_;
    std::size_t skipped_annotations_ = 0;
};

/// Format: '%' line, "id<TAB>name" category lines, '%' line, then
/// "word<TAB>id [id...]" entries; a trailing '*' marks a prefix stem.
LiwcDictionary parse_dic(std::string_view text);
LiwcDictionary load_dic(const std::filesystem::path &path);
std::string format_dic(const LiwcDictionary &dict);

struct Token {
    std::string surface;
    std::size_t position = 0;

    bool operator==(const Token &) const = default;
};

/// Lowercases and splits on anything that is not a letter or apostrophe;
/// leading and trailing apostrophes are stripped. Curly apostrophes count as
/// apostrophes.
std::vector<Token> tokenize(std::string_view text);

struct LiwcVector {
    std::vector<int> counts;   // per category, dictionary column order
    std::vector<double> rates; // counts / total_tokens, zeros for an empty document
    std::size_t total_tokens = 0;
    bool empty_document = false;
};

LiwcVector analyze(std::string_view text, const LiwcDictionary &dict);

struct CorpusMatrix {
    std::vector<std::string> column_names;
    std::vector<int> column_ids;
    std::vector<std::string> agent_ids;
    std::vector<Group> labels;
    std::vector<std::vector<int>> counts;
    std::vector<std::vector<double>> rates;
    std::vector<std::size_t> total_tokens;
};

/// One row per story in input order. Throws Error(EmptyDocument) naming the
/// agent when a story has no tokens.
CorpusMatrix vectorize_corpus(std::span<const StoryRecord> stories,
                              const std::function<Group(const std::string &agent_id)> &group_of,
                              const LiwcDictionary &dict);

} // namespace persona_lab

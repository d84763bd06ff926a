#include "persona_lab/liwc.hpp"

#include "persona_lab/error.hpp"
#include "persona_lab/util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace persona_lab {

std::string_view story_phase_name(StoryPhase phase) noexcept {
    return phase == StoryPhase::Individual ? "Individual" : "InteractiveSecond";
}

std::optional<StoryPhase> parse_story_phase(std::string_view name) noexcept {
    if (name == "Individual") return StoryPhase::Individual;
    if (name == "InteractiveSecond") return StoryPhase::InteractiveSecond;
    return std::nullopt;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const auto start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::optional<int> parse_id(std::string_view token) {
    int value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || value < 0) {
        return std::nullopt;
    }
    return value;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// --- UTF-8 helpers for the tokenizer ---

char32_t decode_utf8(std::string_view s, std::size_t &i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    const auto cont = [&](std::size_t k) -> int {
        if (i + k >= s.size()) return -1;
        const auto b = static_cast<unsigned char>(s[i + k]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const int c = cont(static_cast<std::size_t>(k));
        if (c < 0) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | static_cast<char32_t>(c);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

void append_utf8(std::string &out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019 || cp == 0x2018 || cp == 0x02BC; }

bool is_letter(char32_t cp) {
    if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
    if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
    return (cp >= 0x370 && cp <= 0x3FF && cp != 0x37E && cp != 0x387) || (cp >= 0x400 && cp <= 0x4FF);
}

char32_t to_lower(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
    return cp;
}

} // namespace

std::optional<std::size_t> LiwcDictionary::column_of(int category_id) const {
    const auto it = std::ranges::lower_bound(categories_, category_id, {}, &LiwcCategory::id);
    if (it == categories_.end() || it->id != category_id) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - categories_.begin());
}

void LiwcDictionary::add_entry(const std::string &word, std::vector<int> ids, bool stem) {
    auto &slot = stem ? stems_[word] : literals_[word];
    slot.insert(slot.end(), ids.begin(), ids.end());
    std::ranges::sort(slot);
    slot.erase(std::unique(slot.begin(), slot.end()), slot.end());
}

void LiwcDictionary::build_trie() {
    trie_.assign(1, TrieNode{});
    for (const auto &[stem, ids] : stems_) {
        std::uint32_t node = 0;
        for (char c : stem) {
            auto &children = trie_[node].children;
            auto it = std::ranges::lower_bound(children, c, {}, &std::pair<char, std::uint32_t>::first);
            if (it == children.end() || it->first != c) {
                const auto next = static_cast<std::uint32_t>(trie_.size());
                children.insert(it, {c, next});
                trie_.emplace_back();
                node = next;
            } else {
                node = it->second;
            }
        }
        trie_[node].categories = ids;
    }
}

std::span<const int> LiwcDictionary::lookup(std::string_view token) const {
    if (const auto it = literals_.find(token); it != literals_.end()) {
        return it->second;
    }
    if (trie_.empty()) {
        return {};
    }
    const std::vector<int> *best = nullptr;
    std::uint32_t node = 0;
    for (char c : token) {
        const auto &children = trie_[node].children;
        const auto it = std::ranges::lower_bound(children, c, {}, &std::pair<char, std::uint32_t>::first);
        if (it == children.end() || it->first != c) {
            break;
        }
        node = it->second;
        if (!trie_[node].categories.empty()) {
            best = &trie_[node].categories;
        }
    }
    return best ? std::span<const int>(*best) : std::span<const int>{};
}

LiwcDictionary parse_dic(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }
    LiwcDictionary dict;
    enum class State { Preamble, Categories, Entries } state = State::Preamble;
    std::size_t line_no = 0;
    for (auto raw : split_lines(text)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (state == State::Preamble) {
            if (line != "%") {
                throw DicParseError(Errc::MalformedHeader, line_no, "expected '%' to open the category header");
            }
            state = State::Categories;
            continue;
        }
        if (state == State::Categories) {
            if (line == "%") {
                state = State::Entries;
                continue;
            }
            const auto fields = split_ws(line);
            const auto id = fields.empty() ? std::nullopt : parse_id(fields[0]);
            if (!id || fields.size() < 2) {
                throw DicParseError(Errc::BadEntryLine, line_no, "category line must be 'id<TAB>name'");
            }
            if (dict.column_of(*id)) {
                throw DicParseError(Errc::BadEntryLine, line_no, "duplicate category id " + std::to_string(*id));
            }
            LiwcCategory cat{*id, std::string(fields[1])};
            dict.categories_.insert(std::ranges::upper_bound(dict.categories_, *id, {}, &LiwcCategory::id), cat);
            continue;
        }
        const auto fields = split_ws(line);
        std::string word = ascii_lower(fields[0]);
        bool stem = false;
        if (word.ends_with('*')) {
            word.pop_back();
            stem = true;
        }
        if (word.empty() || word.find('*') != std::string::npos) {
            throw DicParseError(Errc::BadEntryLine, line_no, "bad dictionary word '" + std::string(fields[0]) + "'");
        }
        std::vector<int> ids;
        bool annotated = false;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const auto token = fields[i];
            if (token.find_first_of("()/") != std::string_view::npos) {
                // "(02 3)2/1" spans two fields; swallow up to the closing parenthesis
                int depth = 0;
                for (std::size_t j = i;; ++j) {
                    depth += static_cast<int>(std::ranges::count(fields[j], '(')) -
                             static_cast<int>(std::ranges::count(fields[j], ')'));
                    i = j;
                    if (depth <= 0 || j + 1 == fields.size()) break;
                }
                ++dict.skipped_annotations_;
                annotated = true;
                continue;
            }
            const auto id = parse_id(token);
            if (!id) {
                throw DicParseError(Errc::BadEntryLine, line_no, "bad category reference '" + std::string(token) + "'");
            }
            if (!dict.column_of(*id)) {
                throw DicParseError(Errc::UnknownCategoryRef, line_no,
                                    "'" + word + "' refers to undeclared category " + std::to_string(*id));
            }
            ids.push_back(*id);
        }
        if (ids.empty()) {
            if (annotated) {
                continue; // only conditional categories, none of which we evaluate
            }
            throw DicParseError(Errc::BadEntryLine, line_no, "entry '" + word + "' lists no categories");
        }
        dict.add_entry(word, std::move(ids), stem);
    }
    if (state != State::Entries) {
        throw DicParseError(Errc::MalformedHeader, line_no, "category header is not closed by '%'");
    }
    dict.build_trie();
    return dict;
}

LiwcDictionary load_dic(const std::filesystem::path &path) { return parse_dic(read_file(path)); }

std::string format_dic(const LiwcDictionary &dict) {
    std::string out = "%\n";
    for (const auto &c : dict.categories()) {
        out += std::to_string(c.id) + "\t" + c.name + "\n";
    }
    out += "%\n";
    const auto emit = [&](const std::string &word, const std::vector<int> &ids, bool stem) {
        out += word;
        if (stem) out += '*';
        for (int id : ids) out += "\t" + std::to_string(id);
        out += '\n';
    };
    for (const auto &[w, ids] : dict.literals()) emit(w, ids, false);
    for (const auto &[w, ids] : dict.stems()) emit(w, ids, true);
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::string current;
    const auto flush = [&] {
        // strip leading/trailing apostrophes
        auto first = current.find_first_not_of('\'');
        if (first != std::string::npos) {
            auto last = current.find_last_not_of('\'');
            tokens.push_back({current.substr(first, last - first + 1), tokens.size()});
        }
        current.clear();
    };
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = decode_utf8(text, i);
        if (is_letter(cp)) {
            append_utf8(current, to_lower(cp));
        } else if (is_apostrophe(cp)) {
            current.push_back('\'');
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

LiwcVector analyze(std::string_view text, const LiwcDictionary &dict) {
    LiwcVector v;
    const auto width = dict.categories().size();
    v.counts.assign(width, 0);
    v.rates.assign(width, 0.0);
    const auto tokens = tokenize(text);
    v.total_tokens = tokens.size();
    v.empty_document = tokens.empty();
    for (const auto &token : tokens) {
        for (int id : dict.lookup(token.surface)) {
            ++v.counts[*dict.column_of(id)];
        }
    }
    if (!v.empty_document) {
        for (std::size_t c = 0; c < width; ++c) {
            v.rates[c] = static_cast<double>(v.counts[c]) / static_cast<double>(v.total_tokens);
        }
    }
    return v;
}

CorpusMatrix vectorize_corpus(std::span<const StoryRecord> stories,
                              const std::function<Group(const std::string &)> &group_of, const LiwcDictionary &dict) {
    CorpusMatrix m;
    for (const auto &c : dict.categories()) {
        m.column_names.push_back(c.name);
        m.column_ids.push_back(c.id);
    }
    for (const auto &story : stories) {
        auto v = analyze(story.text, dict);
        if (v.empty_document) {
            throw Error(Errc::EmptyDocument, "story by agent '" + story.agent_id + "' has no tokens");
        }
        m.agent_ids.push_back(story.agent_id);
        m.labels.push_back(group_of(story.agent_id));
        m.counts.push_back(std::move(v.counts));
        m.rates.push_back(std::move(v.rates));
        m.total_tokens.push_back(v.total_tokens);
    }
    return m;
}

} // namespace persona_lab

// Random inputs shared by the unit suites and the acceptance run.
#pragma once

#include "oracles.hpp"
#include "persona_lab/bfi.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

namespace gen {

inline std::map<std::string, int> uniform_answers(int value) {
    std::map<std::string, int> answers;
    for (const auto &item : persona_lab::bfi_items()) answers[std::string(item.letter)] = value;
    return answers;
}

inline std::map<std::string, int> random_answers(std::mt19937_64 &rng) {
    std::map<std::string, int> answers;
    for (const auto &item : persona_lab::bfi_items()) answers[std::string(item.letter)] = static_cast<int>(rng() % 5) + 1;
    return answers;
}

inline std::string sheet_text(const std::map<std::string, int> &answers) {
    std::string out;
    for (const auto &item : persona_lab::bfi_items()) {
        out += "(" + std::string(item.letter) + ") " + std::to_string(answers.at(std::string(item.letter))) + "\n";
    }
    return out;
}

struct RandomDict {
    std::string text;
    std::vector<oracle::Entry> entries; // what the oracle can match
};

/// Small dictionaries over a 4-letter alphabet so stems and literals collide often.
inline RandomDict random_dict(std::mt19937_64 &rng) {
    const std::string alphabet = "abcd";
    const int n_cat = 1 + static_cast<int>(rng() % 5);
    RandomDict d;
    d.text = "%\n";
    for (int c = 1; c <= n_cat; ++c) d.text += std::to_string(c * 10) + "\tcat" + std::to_string(c) + "\n";
    d.text += "%\n";
    const int n_entries = 1 + static_cast<int>(rng() % 12);
    for (int e = 0; e < n_entries; ++e) {
        std::string word;
        const int len = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < len; ++i) word += alphabet[rng() % alphabet.size()];
        if (rng() % 6 == 0) word.insert(word.size() / 2 + 1, "'");
        if (rng() % 2 == 0) word += '*';
        std::vector<int> ids;
        const int n_ids = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n_ids; ++i) ids.push_back(10 * (1 + static_cast<int>(rng() % n_cat)));
        std::string line = word;
        for (int id : ids) line += "\t" + std::to_string(id);
        d.text += line + "\n";
        // entries whose word starts or ends with an apostrophe can never match a token
        if (word.back() != '\'' && word.front() != '\'') d.entries.push_back({word, ids});
    }
    return d;
}

inline std::string random_text(std::mt19937_64 &rng) {
    const std::string chars = "abcdabcdabcdABCD'  ,.-\n";
    std::string t;
    const int len = static_cast<int>(rng() % 80);
    for (int i = 0; i < len; ++i) t += chars[rng() % chars.size()];
    return t;
}

} // namespace gen

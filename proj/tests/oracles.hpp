// Independent reference implementations used to cross-check the library.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

// --- questionnaire ---------------------------------------------------------

// Scoring key of the inventory: 1-based item numbers, R = reverse-keyed.
inline const std::vector<std::pair<std::string, std::string>> &bfi_key() {
    static const std::vector<std::pair<std::string, std::string>> key = {
        {"Extraversion", "1, 6R, 11, 16, 21R, 26, 31R, 36"},
        {"Agreeableness", "2R, 7, 12R, 17, 22, 27R, 32, 37R, 42"},
        {"Conscientiousness", "3, 8R, 13, 18R, 23R, 28, 33, 38, 43R"},
        {"Neuroticism", "4, 9R, 14, 19, 24R, 29, 34R, 39"},
        {"Openness", "5, 10, 15, 20, 25, 30, 35R, 40, 41R, 44"},
    };
    return key;
}

// Item number n (1-based) -> questionnaire letter: a..z, then aa..ar.
inline std::string letter_of(int n) {
    if (n <= 26) return std::string(1, static_cast<char>('a' + n - 1));
    return std::string("a") + static_cast<char>('a' + n - 27);
}

// answers[letter] in 1..5; returns E, A, C, N, O sums by walking the key table.
inline std::vector<int> score(const std::map<std::string, int> &answers) {
    std::vector<int> sums;
    for (const auto &[trait, items] : bfi_key()) {
        int sum = 0;
        std::stringstream ss(items);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok.erase(std::remove(tok.begin(), tok.end(), ' '), tok.end());
            const bool reversed = tok.back() == 'R';
            if (reversed) tok.pop_back();
            const int x = answers.at(letter_of(std::stoi(tok)));
            sum += reversed ? 6 - x : x;
        }
        sums.push_back(sum);
    }
    return sums;
}

// Hand-rolled answer-sheet reader: "(letters)" then optional separator then digits.
inline std::map<std::string, int> parse_sheet(const std::string &text) {
    std::map<std::string, int> out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '(') continue;
        std::size_t j = i + 1;
        while (j < text.size() && text[j] == ' ') ++j;
        std::string letters;
        while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j])) && letters.size() < 3) {
            letters += static_cast<char>(std::tolower(static_cast<unsigned char>(text[j])));
            ++j;
        }
        while (j < text.size() && text[j] == ' ') ++j;
        if (letters.empty() || letters.size() > 2 || j >= text.size() || text[j] != ')') continue;
        ++j;
        while (j < text.size() && text[j] == ' ') ++j;
        if (j < text.size() && (text[j] == ':' || text[j] == '.' || text[j] == '-' || text[j] == '=')) ++j;
        while (j < text.size() && text[j] == ' ') ++j;
        std::string digits;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) digits += text[j++];
        if (!digits.empty()) out[letters] = std::stoi(digits);
    }
    return out;
}

// --- lexicon ---------------------------------------------------------------

struct Entry {
    std::string pattern; // trailing '*' marks a stem
    std::vector<int> ids;
};

// ASCII-only tokenizer: lowercase runs of letters/apostrophes, outer apostrophes stripped.
inline std::vector<std::string> tokens(const std::string &text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        const auto a = cur.find_first_not_of('\'');
        if (a != std::string::npos) out.push_back(cur.substr(a, cur.find_last_not_of('\'') - a + 1));
        cur.clear();
    };
    for (char c : text) {
        if (std::isalpha(static_cast<unsigned char>(c))) cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else if (c == '\'') cur += c;
        else flush();
    }
    flush();
    return out;
}

// Every token against every entry: exact word wins, otherwise the longest matching stem.
inline std::map<int, int> count(const std::vector<Entry> &dict, const std::string &text) {
    std::map<int, int> counts;
    for (const auto &tok : tokens(text)) {
        std::set<int> literal_ids, stem_ids;
        bool literal = false;
        std::size_t best = 0;
        for (const auto &e : dict) {
            if (e.pattern.back() == '*') {
                const auto stem = e.pattern.substr(0, e.pattern.size() - 1);
                if (tok.compare(0, stem.size(), stem) == 0 && tok.size() >= stem.size()) {
                    if (stem.size() > best) {
                        best = stem.size();
                        stem_ids.clear();
                    }
                    if (stem.size() == best) stem_ids.insert(e.ids.begin(), e.ids.end());
                }
            } else if (e.pattern == tok) {
                literal = true;
                literal_ids.insert(e.ids.begin(), e.ids.end());
            }
        }
        for (int id : literal ? literal_ids : stem_ids) ++counts[id];
    }
    return counts;
}

// --- statistics ------------------------------------------------------------

// Ranks by counting: rank = 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> ranks(const std::vector<double> &x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double smaller = 0, equal = 0;
        for (double v : x) {
            smaller += v < x[i];
            equal += v == x[i];
        }
        r[i] = 1 + smaller + (equal - 1) / 2;
    }
    return r;
}

inline double pearson(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// Pooled two-sample t statistic.
inline double t_statistic(const std::vector<double> &a, const std::vector<double> &b) {
    auto mean = [](const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    auto ss = [&](const std::vector<double> &v) {
        const double m = mean(v);
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return s;
    };
    const double na = a.size(), nb = b.size();
    const double sp2 = (ss(a) + ss(b)) / (na + nb - 2);
    return (mean(b) - mean(a)) / std::sqrt(sp2 * (1 / na + 1 / nb));
}

} // namespace oracle

#include "persona_lab/bfi.hpp"

#include "persona_lab/error.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace persona_lab {

namespace {

using enum Trait;

constexpr std::array<BfiItem, kBfiItemCount> kItems = {{
    {"a", "Is talkative", 1, Extraversion, false},
    {"b", "Tends to find fault with others", 2, Agreeableness, true},
    {"c", "Does a thorough job", 3, Conscientiousness, false},
    {"d", "Is depressed, blue", 4, Neuroticism, false},
    {"e", "Is original, comes up with new ideas", 5, Openness, false},
    {"f", "Is reserved", 6, Extraversion, true},
    {"g", "Is helpful and unselfish with others", 7, Agreeableness, false},
    {"h", "Can be somewhat careless", 8, Conscientiousness, true},
    {"i", "Is relaxed, handles stress well", 9, Neuroticism, true},
    {"j", "Is curious about many different things", 10, Openness, false},
    {"k", "Is full of energy", 11, Extraversion, false},
    {"l", "Starts quarrels with others", 12, Agreeableness, true},
    {"m", "Is a reliable worker", 13, Conscientiousness, false},
    {"n", "Can be tense", 14, Neuroticism, false},
    {"o", "Is ingenious, a deep thinker", 15, Openness, false},
    {"p", "Generates a lot of enthusiasm", 16, Extraversion, false},
    {"q", "Has a forgiving nature", 17, Agreeableness, false},
    {"r", "Tends to be disorganized", 18, Conscientiousness, true},
    {"s", "Worries a lot", 19, Neuroticism, false},
    {"t", "Has an active imagination", 20, Openness, false},
    {"u", "Tends to be quiet", 21, Extraversion, true},
    {"v", "Is generally trusting", 22, Agreeableness, false},
    {"w", "Tends to be lazy", 23, Conscientiousness, true},
    {"x", "Is emotionally stable, not easily upset", 24, Neuroticism, true},
    {"y", "Is inventive", 25, Openness, false},
    {"z", "Has an assertive personality", 26, Extraversion, false},
    {"aa", "Can be cold and aloof", 27, Agreeableness, true},
    {"ab", "Perseveres until the task is finished", 28, Conscientiousness, false},
    {"ac", "Can be moody", 29, Neuroticism, false},
    {"ad", "Values artistic, aesthetic experiences", 30, Openness, false},
    {"ae", "Is sometimes shy, inhibited", 31, Extraversion, true},
    {"af", "Is considerate and kind to almost everyone", 32, Agreeableness, false},
    {"ag", "Does things efficiently", 33, Conscientiousness, false},
    {"ah", "Remains calm in tense situations", 34, Neuroticism, true},
    {"ai", "Prefers work that is routine", 35, Openness, true},
    {"aj", "Is outgoing, sociable", 36, Extraversion, false},
    {"ak", "Is sometimes rude to others", 37, Agreeableness, true},
    {"al", "Makes plans and follows through with them", 38, Conscientiousness, false},
    {"am", "Gets nervous easily", 39, Neuroticism, false},
    {"an", "Likes to reflect, play with ideas", 40, Openness, false},
    {"ao", "Has few artistic interests", 41, Openness, true},
    {"ap", "Likes to cooperate with others", 42, Agreeableness, false},
    {"aq", "Is easily distracted", 43, Conscientiousness, true},
    {"ar", "Is sophisticated in art, music, or literature", 44, Openness, false},
}};

constexpr std::string_view kPromptTemplate =
    "Here are a number of characteristics that may or may not apply to you. For example, do you agree that you "
    "are someone who likes to spend time with others? Please write a number next to each statement to indicate "
    "the extent to which you agree or disagree with that statement, such as `(a) 1' without explanation "
    "separated by new lines.\n"
    "\n"
    "1 for Disagree strongly, 2 Disagree a little, 3 for Neither agree nor disagree, 4 for Agree a little, 5 for "
    "Agree strongly.\n"
    "\n"
    "Statements: {BFI statements}";

} // namespace

std::span<const BfiItem, kBfiItemCount> bfi_items() noexcept { return kItems; }

const BfiItem *find_bfi_item(std::string_view letter) noexcept {
    const auto it = std::ranges::find(kItems, letter, &BfiItem::letter);
    return it == kItems.end() ? nullptr : &*it;
}

int items_per_trait(Trait trait) noexcept {
    return static_cast<int>(std::ranges::count(kItems, trait, &BfiItem::trait));
}

std::string_view phase_name(BfiPhase phase) noexcept {
    switch (phase) {
    case BfiPhase::BeforeWriting: return "BeforeWriting";
    case BfiPhase::AfterNonInteractiveWriting: return "AfterNonInteractiveWriting";
    case BfiPhase::AfterInteractiveWriting: return "AfterInteractiveWriting";
    }
    return "?";
}

std::optional<BfiPhase> parse_phase(std::string_view name) noexcept {
    for (auto p : {BfiPhase::BeforeWriting, BfiPhase::AfterNonInteractiveWriting, BfiPhase::AfterInteractiveWriting}) {
        if (phase_name(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

std::vector<std::string> BfiAnswerSheet::missing_letters() const {
    std::vector<std::string> missing;
    for (const auto &item : kItems) {
        if (!answers.contains(std::string(item.letter))) {
            missing.emplace_back(item.letter);
        }
    }
    return missing;
}

std::string build_bfi_prompt() {
    // each statement on its own line, directly after "Statements:"
    std::string statements;
    for (const auto &item : kItems) {
        statements += "\n(";
        statements += item.letter;
        statements += ") ";
        statements += item.text;
    }
    std::string prompt(kPromptTemplate);
    const std::string_view placeholder = "{BFI statements}";
    prompt.replace(prompt.find(placeholder), placeholder.size(), statements);
    return prompt;
}

namespace {

void require_complete(const BfiAnswerSheet &sheet) {
    if (!sheet.complete()) {
        auto missing = sheet.missing_letters();
        const auto n = missing.size();
        throw IncompleteSheetError(std::move(missing), std::to_string(n) + " of 44 items unanswered");
    }
}

} // namespace

BfiAnswerSheet parse_answer_sheet(std::string_view text) {
    // "(a) 4", "(a): 4", "(ab). 2", "( b ) - 5"
    static const std::regex answer_re(R"(\(\s*([A-Za-z]{1,2})\s*\)\s*[:.\-=]?\s*(\d+))");
    BfiAnswerSheet sheet;
    sheet.source_text = std::string(text);
    const std::string owned(text);
    for (auto it = std::sregex_iterator(owned.begin(), owned.end(), answer_re); it != std::sregex_iterator(); ++it) {
        std::string letter = (*it)[1].str();
        std::ranges::transform(letter, letter.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (find_bfi_item(letter) == nullptr) {
            continue;
        }
        const auto digits = (*it)[2].str();
        const int value = digits.size() > 2 ? 99 : std::stoi(digits);
        if (value < kLikertMin || value > kLikertMax) {
            throw Error(Errc::OutOfRangeAnswer, "(" + letter + ") " + digits + " is outside 1..5");
        }
        const auto [pos, inserted] = sheet.answers.emplace(letter, value);
        if (!inserted && pos->second != value) {
            throw Error(Errc::DuplicateLetter, "(" + letter + ") answered both " + std::to_string(pos->second) +
                                                   " and " + std::to_string(value));
        }
    }
    require_complete(sheet);
    return sheet;
}

TraitScores score(const BfiAnswerSheet &sheet, BfiPhase phase) {
    require_complete(sheet);
    TraitScores scores;
    scores.phase = phase;
    for (const auto &item : kItems) {
        const int answer = sheet.answers.at(std::string(item.letter));
        scores.sums[trait_index(item.trait)] += item.reversed ? 6 - answer : answer;
    }
    return scores;
}

BfiAdministration administer_bfi(const AgentSpec &agent, std::vector<ChatMessage> context, AgentChannel &channel,
                                 BfiPhase phase, int max_attempts) {
    if (context.empty() || context.front().role != Role::System) {
        throw Error(Errc::Config, "BFI context for agent '" + agent.agent_id + "' must start with its persona prompt");
    }
    if (max_attempts < 1) {
        throw Error(Errc::Config, "bfi attempts must be at least 1");
    }
    context.push_back({Role::User, build_bfi_prompt()});
    BfiAdministration result;
    std::string last_problem;
    while (result.attempts < max_attempts) {
        ++result.attempts;
        auto reply = channel.generate(context);
        result.raw_texts.push_back(reply.text);
        try {
            result.scores = score(parse_answer_sheet(reply.text), phase);
            return result;
        } catch (const Error &e) {
            // IncompleteSheet, OutOfRangeAnswer and DuplicateLetter all mean "resample"
            last_problem = e.what();
        }
    }
    throw PersistentlyMalformedError(std::move(result.raw_texts),
                                     "agent '" + agent.agent_id + "' gave no usable BFI sheet in " +
                                         std::to_string(max_attempts) + " attempts; last: " + last_problem);
}

} // namespace persona_lab

#pragma once

#include "persona_lab/llm_backend.hpp"
#include "persona_lab/persona.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace persona_lab {

struct BfiItem {
    std::string_view letter;
    std::string_view text;
    int canonical_index; // 1..44, the item's ordinal position
    Trait trait;
    bool reversed;
};

inline constexpr int kBfiItemCount = 44;
inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;

/// The 44 statements in questionnaire order, with trait keys and reverse flags.
std::span<const BfiItem, kBfiItemCount> bfi_items() noexcept;
const BfiItem *find_bfi_item(std::string_view letter) noexcept;
/// Number of items keyed to a trait (E 8, A 9, C 9, N 8, O 10).
int items_per_trait(Trait trait) noexcept;

enum class BfiPhase { BeforeWriting, AfterNonInteractiveWriting, AfterInteractiveWriting };

std::string_view phase_name(BfiPhase phase) noexcept;
std::optional<BfiPhase> parse_phase(std::string_view name) noexcept;

struct BfiAnswerSheet {
    std::map<std::string, int> answers; // letter -> 1..5
    std::string source_text;

    [[nodiscard]] bool complete() const noexcept { return answers.size() == kBfiItemCount; }
    [[nodiscard]] std::vector<std::string> missing_letters() const;
};

struct TraitScores {
    std::array<int, 5> sums{};
    BfiPhase phase = BfiPhase::BeforeWriting;

    [[nodiscard]] int operator[](Trait trait) const noexcept { return sums[trait_index(trait)]; }
    bool operator==(const TraitScores &) const = default;
};

std::string build_bfi_prompt();

/// Extracts "(letter) digit" answers anywhere in the text. Accepts ':', '.',
/// '-' or ')' style separators and arbitrary prose around the answers.
/// Throws OutOfRangeAnswer, DuplicateLetter, or IncompleteSheet (carrying the
/// missing letters) when fewer than 44 items were answered.
BfiAnswerSheet parse_answer_sheet(std::string_view text);

/// Sums each trait's items, reverse-keyed items contributing 6 - answer.
/// Throws IncompleteSheetError when any item is unanswered.
TraitScores score(const BfiAnswerSheet &sheet, BfiPhase phase = BfiPhase::BeforeWriting);

struct BfiAdministration {
    TraitScores scores;
    int attempts = 0;
    std::vector<std::string> raw_texts;
};

/// Appends the questionnaire to `context`, samples, parses and scores. A
/// malformed sheet is re-sampled from scratch; after `max_attempts` failures
/// a PersistentlyMalformedError carrying every raw reply is thrown.
BfiAdministration administer_bfi(const AgentSpec &agent, std::vector<ChatMessage> context, AgentChannel &channel,
                                 BfiPhase phase, int max_attempts = 3);

} // namespace persona_lab

#pragma once

#include "persona_lab/llm_backend.hpp"
#include "persona_lab/persona.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace persona_lab {

/// Knobs of the synthetic persona mock. All randomness is derived from
/// `seed` and the request fingerprint, so replies do not depend on call order.
struct SyntheticMockConfig {
    std::uint64_t seed = 0;
    double signal_fraction = 0.7;     // content words drawn from the persona's own word lists
    double cross_fraction = 0.0;      // share of those drawn from the opposite persona's lists instead
    double alignment = 0.5;           // interactive stories: share borrowed from the partner's story
    double answer_noise = 0.15;       // chance a questionnaire answer moves one step
    double post_writing_drift = 0.3;  // low-pole personas answer closer to the high pole after writing
    double malformed_rate = 0.0;      // chance a questionnaire reply drops its last lines
    double short_story_rate = 0.0;    // chance a story falls below the word filter
    int story_min_words = 560;
    int story_max_words = 860;

    bool operator==(const SyntheticMockConfig &) const = default;
};

/// Word lists the mock writes from; data/mini_liwc.dic covers all of them.
struct MockLexicon {
    std::span<const std::string_view> posemo;
    std::span<const std::string_view> incl;
    std::span<const std::string_view> negemo;
    std::span<const std::string_view> discrep;
    std::span<const std::string_view> neutral;
    std::span<const std::string_view> function_words;
};

const MockLexicon &mock_lexicon() noexcept;

/// Answers questionnaire and story prompts in the voice of whichever profile
/// owns the request's system prompt. Unrecognised requests are script misses.
Responder make_synthetic_responder(std::vector<PersonaProfile> profiles, SyntheticMockConfig config);

} // namespace persona_lab

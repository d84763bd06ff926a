#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace persona_lab {

enum class StoryPhase { Individual, InteractiveSecond };

std::string_view story_phase_name(StoryPhase phase) noexcept;
std::optional<StoryPhase> parse_story_phase(std::string_view name) noexcept;

/// One generated story. accepted <=> word_min <= word_count <= word_max;
/// partner_agent_id is set exactly for InteractiveSecond stories.
struct StoryRecord {
    std::string agent_id;
    StoryPhase phase = StoryPhase::Individual;
    std::optional<std::string> partner_agent_id;
    std::string text;
    std::size_t word_count = 0;
    bool accepted = false;
    int attempt = 0;

    bool operator==(const StoryRecord &) const = default;
};

} // namespace persona_lab

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace persona_lab {

/// Big Five dimensions in report-column order.
enum class Trait { Extraversion, Agreeableness, Conscientiousness, Neuroticism, Openness };

inline constexpr std::array<Trait, 5> kTraits = {Trait::Extraversion, Trait::Agreeableness,
                                                 Trait::Conscientiousness, Trait::Neuroticism,
                                                 Trait::Openness};

std::string_view trait_name(Trait trait) noexcept;
std::string_view trait_abbrev(Trait trait) noexcept;
std::optional<Trait> parse_trait(std::string_view text) noexcept;

constexpr std::size_t trait_index(Trait trait) noexcept { return static_cast<std::size_t>(trait); }

enum class Polarity { High, Low };

std::string_view polarity_name(Polarity polarity) noexcept;

/// Binary group coding: positive point-biserial coefficients point at the creative group.
enum class Group : int { Analytical = 0, Creative = 1 };

std::string_view group_name(Group group) noexcept;
std::optional<Group> parse_group(std::string_view name) noexcept;

struct PersonaProfile {
    std::string id;
    std::string display_name;
    std::string system_prompt;
    std::array<Polarity, 5> expected_polarity{};
    Group group = Group::Analytical;

    bool operator==(const PersonaProfile &) const = default;
};

struct AgentSpec {
    std::string agent_id;
    std::string profile_id;
    Group group = Group::Analytical;
    double sampling_temperature = 0.7;

    bool operator==(const AgentSpec &) const = default;
};

inline constexpr std::string_view kCreativePrompt =
    "You are a character who is extroverted, agreeable, conscientious, neurotic and open to "
    "experience.";
inline constexpr std::string_view kAnalyticalPrompt =
    "You are a character who is introverted, antagonistic, unconscientious, emotionally stable and "
    "closed to experience.";

/// The two fixed profiles: `creative` (all traits High) and `analytical` (all Low).
std::vector<PersonaProfile> builtin_profiles();

Polarity expected_polarity(const PersonaProfile &profile, Trait trait) noexcept;

/// Parses a profile catalogue of `[profile]` sections with `key = value` lines:
/// id, display_name, system_prompt, group (creative|analytical) and one line per
/// trait (extraversion = high). Lines starting with '#' are comments.
std::vector<PersonaProfile> parse_profiles(std::string_view text);
std::vector<PersonaProfile> load_profiles(const std::filesystem::path &path);
std::string format_profiles(const std::vector<PersonaProfile> &profiles);

const PersonaProfile *find_profile(const std::vector<PersonaProfile> &profiles, std::string_view id) noexcept;

} // namespace persona_lab

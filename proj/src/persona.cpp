#include "persona_lab/persona.hpp"

#include "persona_lab/error.hpp"
#include "persona_lab/util.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace persona_lab {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string_view trait_name(Trait trait) noexcept {
    switch (trait) {
    case Trait::Extraversion: return "Extraversion";
    case Trait::Agreeableness: return "Agreeableness";
    case Trait::Conscientiousness: return "Conscientiousness";
    case Trait::Neuroticism: return "Neuroticism";
    case Trait::Openness: return "Openness";
    }
    return "?";
}

std::string_view trait_abbrev(Trait trait) noexcept { return trait_name(trait).substr(0, 1); }

std::optional<Trait> parse_trait(std::string_view text) noexcept {
    const auto key = lower(text);
    for (Trait t : kTraits) {
        if (key == lower(trait_name(t)) || key == lower(trait_abbrev(t))) {
            return t;
        }
    }
    return std::nullopt;
}

std::string_view polarity_name(Polarity polarity) noexcept {
    return polarity == Polarity::High ? "high" : "low";
}

std::string_view group_name(Group group) noexcept {
    return group == Group::Creative ? "creative" : "analytical";
}

std::optional<Group> parse_group(std::string_view name) noexcept {
    if (name == "creative") return Group::Creative;
    if (name == "analytical") return Group::Analytical;
    return std::nullopt;
}

std::vector<PersonaProfile> builtin_profiles() {
    PersonaProfile creative{"creative", "Creative", std::string(kCreativePrompt), {}, Group::Creative};
    creative.expected_polarity.fill(Polarity::High);
    PersonaProfile analytical{"analytical", "Analytical", std::string(kAnalyticalPrompt), {}, Group::Analytical};
    analytical.expected_polarity.fill(Polarity::Low);
    return {std::move(creative), std::move(analytical)};
}

Polarity expected_polarity(const PersonaProfile &profile, Trait trait) noexcept {
    return profile.expected_polarity[trait_index(trait)];
}

std::vector<PersonaProfile> parse_profiles(std::string_view text) {
    struct Pending {
        PersonaProfile profile;
        std::set<std::string> seen;
        std::size_t line = 0;
    };
    std::vector<PersonaProfile> profiles;
    std::optional<Pending> current;

    const auto finish = [&] {
        if (!current) {
            return;
        }
        auto &p = *current;
        const auto where = " (profile starting at line " + std::to_string(p.line) + ")";
        for (const char *key : {"id", "system_prompt", "group"}) {
            if (!p.seen.contains(key)) {
                throw Error(Errc::Config, std::string("missing '") + key + "'" + where);
            }
        }
        for (Trait t : kTraits) {
            if (!p.seen.contains(lower(trait_name(t)))) {
                throw Error(Errc::Config, "missing polarity for " + std::string(trait_name(t)) + where);
            }
        }
        if (p.profile.display_name.empty()) {
            p.profile.display_name = p.profile.id;
        }
        if (find_profile(profiles, p.profile.id) != nullptr) {
            throw Error(Errc::Config, "duplicate profile id '" + p.profile.id + "'");
        }
        profiles.push_back(std::move(p.profile));
        current.reset();
    };

    std::size_t line_no = 0;
    for (auto raw : split_lines(text)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line == "[profile]") {
            finish();
            current.emplace();
            current->line = line_no;
            continue;
        }
        const auto eq = line.find('=');
        if (!current || eq == std::string_view::npos) {
            throw Error(Errc::Config, "profile file line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = lower(trim(line.substr(0, eq)));
        const auto value = std::string(trim(line.substr(eq + 1)));
        auto &p = current->profile;
        if (key == "id") {
            p.id = value;
        } else if (key == "display_name") {
            p.display_name = value;
        } else if (key == "system_prompt") {
            p.system_prompt = value;
        } else if (key == "group") {
            const auto g = lower(value);
            if (g == "creative" || g == "1") {
                p.group = Group::Creative;
            } else if (g == "analytical" || g == "0") {
                p.group = Group::Analytical;
            } else {
                throw Error(Errc::Config, "line " + std::to_string(line_no) + ": group must be creative or analytical");
            }
        } else if (auto trait = parse_trait(key); trait && key.size() > 1) {
            const auto v = lower(value);
            if (v != "high" && v != "low") {
                throw Error(Errc::Config, "line " + std::to_string(line_no) + ": polarity must be high or low");
            }
            p.expected_polarity[trait_index(*trait)] = v == "high" ? Polarity::High : Polarity::Low;
        } else {
            throw Error(Errc::Config, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        current->seen.insert(key);
    }
    finish();

    for (const auto &p : profiles) {
        if (p.id.empty() || p.system_prompt.empty()) {
            throw Error(Errc::Config, "profile id and system_prompt must be non-empty");
        }
    }
    return profiles;
}

std::vector<PersonaProfile> load_profiles(const std::filesystem::path &path) {
    return parse_profiles(read_file(path));
}

std::string format_profiles(const std::vector<PersonaProfile> &profiles) {
    std::string out;
    for (const auto &p : profiles) {
        out += "[profile]\n";
        out += "id = " + p.id + "\n";
        out += "display_name = " + p.display_name + "\n";
        out += "system_prompt = " + p.system_prompt + "\n";
        out += "group = " + std::string(group_name(p.group)) + "\n";
        for (Trait t : kTraits) {
            out += lower(trait_name(t)) + " = " + std::string(polarity_name(expected_polarity(p, t))) + "\n";
        }
        out += "\n";
    }
    return out;
}

const PersonaProfile *find_profile(const std::vector<PersonaProfile> &profiles, std::string_view id) noexcept {
    const auto it = std::ranges::find(profiles, id, &PersonaProfile::id);
    return it == profiles.end() ? nullptr : &*it;
}

} // namespace persona_lab

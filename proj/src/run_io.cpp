#include "persona_lab/error.hpp"
#include "persona_lab/experiment.hpp"
#include "persona_lab/util.hpp"

#include <charconv>

namespace persona_lab {

using nlohmann::json;
namespace fs = std::filesystem;

bool RunArtifact::operator==(const RunArtifact &o) const {
    return schema_version == o.schema_version && run_id == o.run_id && experiment == o.experiment &&
           tool_version == o.tool_version && context_policy == o.context_policy &&
           config_to_json(config, false) == config_to_json(o.config, false) && profiles == o.profiles &&
           agents == o.agents && bfi == o.bfi && stories == o.stories && pairs == o.pairs && failures == o.failures;
}

namespace {

constexpr const char *kConfigFile = "config.json";
constexpr const char *kManifestFile = "run.json";
constexpr const char *kAgentsFile = "agents.csv";
constexpr const char *kBfiFile = "bfi_scores.csv";
constexpr const char *kStoriesFile = "stories.jsonl";
constexpr const char *kStoreFile = "replay_store.jsonl";

[[noreturn]] void corrupt(const std::string &msg) { throw Error(Errc::CorruptRun, msg); }

json profile_to_json(const PersonaProfile &p) {
    json polarity = json::object();
    for (Trait t : kTraits) polarity[std::string(trait_name(t))] = polarity_name(expected_polarity(p, t));
    return {{"id", p.id},
            {"display_name", p.display_name},
            {"system_prompt", p.system_prompt},
            {"group", group_name(p.group)},
            {"polarity", polarity}};
}

PersonaProfile profile_from_json(const json &j) {
    PersonaProfile p;
    p.id = j.at("id").get<std::string>();
    p.display_name = j.at("display_name").get<std::string>();
    p.system_prompt = j.at("system_prompt").get<std::string>();
    const auto group = parse_group(j.at("group").get<std::string>());
    if (!group) corrupt("profile '" + p.id + "' has an unknown group");
    p.group = *group;
    for (Trait t : kTraits) {
        const auto v = j.at("polarity").at(std::string(trait_name(t))).get<std::string>();
        if (v != "high" && v != "low") corrupt("profile '" + p.id + "' has a bad polarity");
        p.expected_polarity[trait_index(t)] = v == "high" ? Polarity::High : Polarity::Low;
    }
    return p;
}

json story_to_json(const StoryRecord &s) {
    return {{"agent_id", s.agent_id},
            {"phase", story_phase_name(s.phase)},
            {"partner_agent_id", s.partner_agent_id ? json(*s.partner_agent_id) : json(nullptr)},
            {"text", s.text},
            {"word_count", s.word_count},
            {"accepted", s.accepted},
            {"attempt", s.attempt}};
}

StoryRecord story_from_json(const json &j) {
    StoryRecord s;
    s.agent_id = j.at("agent_id").get<std::string>();
    const auto phase = parse_story_phase(j.at("phase").get<std::string>());
    if (!phase) corrupt("story for '" + s.agent_id + "' has an unknown phase");
    s.phase = *phase;
    if (const auto &p = j.at("partner_agent_id"); !p.is_null()) s.partner_agent_id = p.get<std::string>();
    s.text = j.at("text").get<std::string>();
    s.word_count = j.at("word_count").get<std::size_t>();
    s.accepted = j.at("accepted").get<bool>();
    s.attempt = j.at("attempt").get<int>();
    return s;
}

template <typename T> T parse_number(const std::string &field, const char *what) {
    T value{};
    const auto *end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end) corrupt(std::string("bad ") + what + " '" + field + "'");
    return value;
}

std::vector<std::vector<std::string>> read_csv(const fs::path &path, std::string_view header) {
    const auto text = read_file(path);
    const auto lines = split_lines(text);
    if (lines.empty() || lines.front() != header) corrupt(path.filename().string() + ": unexpected header");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        rows.push_back(csv_split(lines[i]));
    }
    return rows;
}

} // namespace

void save_run(const RunArtifact &a, const fs::path &dir, const std::optional<fs::path> &replay_store) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::Config, "cannot create run directory " + dir.string() + ": " + ec.message());

    std::map<std::string, std::string> contents;
    contents[kConfigFile] = config_to_json(a.config, false).dump(2) + "\n";

    std::string agents = "agent_id,profile_id,group,temperature\n";
    for (const auto &ag : a.agents) {
        agents += csv_escape(ag.agent_id) + "," + csv_escape(ag.profile_id) + "," + std::string(group_name(ag.group)) +
                  "," + format_double(ag.sampling_temperature) + "\n";
    }
    contents[kAgentsFile] = std::move(agents);

    std::string bfi = "run_id,agent_id,group,phase,E,A,C,N,O\n";
    for (const auto &r : a.bfi) {
        bfi += csv_escape(a.run_id) + "," + csv_escape(r.agent_id) + "," + std::string(group_name(r.group)) + "," +
               std::string(phase_name(r.scores.phase));
        for (int v : r.scores.sums) bfi += "," + std::to_string(v);
        bfi += "\n";
    }
    contents[kBfiFile] = std::move(bfi);

    std::string stories;
    for (const auto &s : a.stories) stories += story_to_json(s).dump() + "\n";
    contents[kStoriesFile] = std::move(stories);

    if (replay_store) {
        contents[kStoreFile] = read_file(*replay_store);
    }

    json files = json::object();
    for (const auto &[name, body] : contents) {
        write_file(dir / name, body);
        files[name] = sha256_hex(body);
    }

    json profiles = json::array();
    for (const auto &p : a.profiles) profiles.push_back(profile_to_json(p));
    json pairs = json::array();
    for (const auto &p : a.pairs) pairs.push_back({{"analytical", p.analytical_id}, {"creative", p.creative_id}});
    json failures = json::array();
    for (const auto &f : a.failures) {
        failures.push_back({{"agent_id", f.agent_id}, {"stage", f.stage}, {"message", f.message}, {"raw_texts", f.raw_texts}});
    }
    const json manifest = {{"schema_version", a.schema_version},
                           {"run_id", a.run_id},
                           {"experiment", experiment_name(a.experiment)},
                           {"tool_version", a.tool_version},
                           {"context_policy", a.context_policy},
                           {"profiles", profiles},
                           {"pairs", pairs},
                           {"failures", failures},
                           {"files", files}};
    write_file(dir / kManifestFile, manifest.dump(2) + "\n");
}

RunArtifact load_run(const fs::path &dir) {
    if (!fs::exists(dir / kManifestFile)) {
        corrupt("no " + std::string(kManifestFile) + " in " + dir.string());
    }
    json manifest;
    try {
        manifest = json::parse(read_file(dir / kManifestFile));
    } catch (const json::exception &e) {
        corrupt(std::string(kManifestFile) + " is not valid JSON: " + e.what());
    }

    RunArtifact a;
    try {
        const auto version = manifest.at("schema_version").get<int>();
        if (version != kSchemaVersion) {
            throw Error(Errc::SchemaMismatch, "run schema version " + std::to_string(version) + ", expected " +
                                                  std::to_string(kSchemaVersion));
        }
        for (const auto &[name, digest] : manifest.at("files").items()) {
            if (!fs::exists(dir / name)) corrupt("missing run file " + name);
            if (sha256_hex(read_file(dir / name)) != digest.get<std::string>()) corrupt(name + " does not match its hash");
        }
        for (const char *required : {kConfigFile, kAgentsFile, kBfiFile, kStoriesFile}) {
            if (!manifest["files"].contains(required)) corrupt(std::string("manifest does not list ") + required);
        }

        a.run_id = manifest.at("run_id").get<std::string>();
        const auto kind = parse_experiment(manifest.at("experiment").get<std::string>());
        if (!kind) corrupt("unknown experiment kind");
        a.experiment = *kind;
        a.tool_version = manifest.at("tool_version").get<std::string>();
        a.context_policy = manifest.at("context_policy").get<std::string>();
        for (const auto &p : manifest.at("profiles")) a.profiles.push_back(profile_from_json(p));
        for (const auto &p : manifest.at("pairs")) {
            a.pairs.push_back({p.at("analytical").get<std::string>(), p.at("creative").get<std::string>()});
        }
        for (const auto &f : manifest.at("failures")) {
            a.failures.push_back({f.at("agent_id").get<std::string>(), f.at("stage").get<std::string>(),
                                  f.at("message").get<std::string>(), f.at("raw_texts").get<std::vector<std::string>>()});
        }

        try {
            a.config = parse_config(read_file(dir / kConfigFile));
        } catch (const Error &e) {
            corrupt(std::string("config.json: ") + e.what());
        }

        for (const auto &row : read_csv(dir / kAgentsFile, "agent_id,profile_id,group,temperature")) {
            if (row.size() != 4) corrupt("agents.csv: wrong field count");
            const auto group = parse_group(row[2]);
            if (!group) corrupt("agents.csv: unknown group '" + row[2] + "'");
            a.agents.push_back({row[0], row[1], *group, std::stod(row[3])});
        }
        for (const auto &row : read_csv(dir / kBfiFile, "run_id,agent_id,group,phase,E,A,C,N,O")) {
            if (row.size() != 9) corrupt("bfi_scores.csv: wrong field count");
            if (row[0] != a.run_id) corrupt("bfi_scores.csv: run_id does not match the manifest");
            BfiRecord r;
            r.agent_id = row[1];
            const auto group = parse_group(row[2]);
            const auto phase = parse_phase(row[3]);
            if (!group || !phase) corrupt("bfi_scores.csv: bad group or phase");
            r.group = *group;
            r.scores.phase = *phase;
            for (std::size_t t = 0; t < 5; ++t) r.scores.sums[t] = parse_number<int>(row[4 + t], "trait score");
            a.bfi.push_back(std::move(r));
        }
        const auto stories_text = read_file(dir / kStoriesFile);
        for (const auto line : split_lines(stories_text)) {
            if (line.empty()) continue;
            a.stories.push_back(story_from_json(json::parse(line)));
        }
    } catch (const json::exception &e) {
        corrupt(std::string("malformed run record: ") + e.what());
    } catch (const std::invalid_argument &e) {
        corrupt(std::string("malformed number: ") + e.what());
    }

    for (const auto &r : a.bfi) {
        const auto *agent = a.find_agent(r.agent_id);
        if (agent == nullptr || agent->group != r.group) corrupt("bfi record for unknown agent '" + r.agent_id + "'");
    }
    for (const auto &s : a.stories) {
        if (a.find_agent(s.agent_id) == nullptr) corrupt("story for unknown agent '" + s.agent_id + "'");
    }
    return a;
}

} // namespace persona_lab

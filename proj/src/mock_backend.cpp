#include "persona_lab/mock_backend.hpp"

#include "persona_lab/bfi.hpp"
#include "persona_lab/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <random>
#include <set>

namespace persona_lab {

namespace {

constexpr std::array<std::string_view, 16> kPosemo = {"happy",   "joy",      "love",     "glad",     "wonderful", "delight",
                                                      "cheerful", "kind",     "grateful", "excited",  "laugh",     "warm",
                                                      "beautiful", "proud",   "smile",    "hopeful"};
constexpr std::array<std::string_view, 8> kIncl = {"with", "and", "along", "together", "both", "include", "around", "plus"};
constexpr std::array<std::string_view, 14> kNegemo = {"sad",   "hate",  "angry",  "afraid", "bitter", "worthless", "nasty",
                                                      "hurt",  "lonely", "annoyed", "gloomy", "upset", "awful",   "grief"};
constexpr std::array<std::string_view, 10> kDiscrep = {"could", "should", "would",   "ought", "need",
                                                       "wish",  "lack",   "suppose", "rather", "besides"};
constexpr std::array<std::string_view, 24> kNeutral = {
    "day",    "city",   "morning", "walked", "house",  "river",  "road",  "table",
    "window", "street", "train",   "letter", "door",   "garden", "coffee", "book",
    "year",   "school", "office",  "friend", "family", "winter", "car",   "work"};
constexpr std::array<std::string_view, 12> kFunction = {"the", "a", "i", "we", "it", "my", "was", "to", "of", "in", "that", "they"};

const MockLexicon kLexicon{kPosemo, kIncl, kNegemo, kDiscrep, kNeutral, kFunction};

enum class Task { Questionnaire, Story, InteractiveStory };

constexpr std::string_view kPartnerMarker = "Last response to question is ";

std::string_view pick(std::span<const std::string_view> words, std::mt19937_64 &rng) {
    return words[uniform_below(rng, words.size())];
}

bool chance(std::mt19937_64 &rng, double p) { return uniform_unit(rng) < p; }

class SyntheticResponder {
  public:
    SyntheticResponder(std::vector<PersonaProfile> profiles, SyntheticMockConfig config)
        : profiles_(std::move(profiles)), config_(config) {}

    std::optional<std::string> operator()(const GenerationRequest &request) const {
        if (request.messages.empty() || request.messages.front().role != Role::System) {
            return std::nullopt;
        }
        const auto *profile = profile_for(request.messages.front().content);
        const ChatMessage *user = nullptr;
        for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
            if (it->role == Role::User) {
                user = &*it;
                break;
            }
        }
        if (profile == nullptr || user == nullptr) {
            return std::nullopt;
        }
        std::mt19937_64 rng(sha256_u64(std::to_string(config_.seed) + ":" + fingerprint(request)));
        if (user->content.starts_with("Here are a number of characteristics")) {
            return questionnaire(*profile, request, rng);
        }
        if (user->content.starts_with("Please share a personal story")) {
            const auto marker = user->content.find(kPartnerMarker);
            const std::string_view partner =
                marker == std::string::npos ? std::string_view{}
                                            : std::string_view(user->content).substr(marker + kPartnerMarker.size());
            return story(*profile, partner, marker != std::string::npos, rng);
        }
        return std::nullopt;
    }

  private:
    const PersonaProfile *profile_for(std::string_view system_prompt) const {
        for (const auto &p : profiles_) {
            if (p.system_prompt == system_prompt) {
                return &p;
            }
        }
        return nullptr;
    }

    std::string questionnaire(const PersonaProfile &profile, const GenerationRequest &request,
                              std::mt19937_64 &rng) const {
        // a prior assistant turn means the agent has written a story in this context
        const auto wrote = std::ranges::any_of(request.messages, [](const ChatMessage &m) { return m.role == Role::Assistant; });
        const bool interactive = std::ranges::any_of(request.messages, [](const ChatMessage &m) {
            return m.role == Role::User && m.content.find(kPartnerMarker) != std::string::npos;
        });
        const double drift = !wrote ? 0.0 : (interactive ? config_.post_writing_drift * 0.5 : config_.post_writing_drift);

        std::string out;
        if (chance(rng, 0.3)) {
            out += "Sure, here are my answers:\n";
        }
        const bool malformed = chance(rng, config_.malformed_rate);
        const auto items = bfi_items();
        const std::size_t emitted = malformed ? items.size() - 3 : items.size();
        for (std::size_t i = 0; i < emitted; ++i) {
            const auto &item = items[i];
            const bool high = expected_polarity(profile, item.trait) == Polarity::High;
            const bool agree = high != item.reversed;
            int answer = agree ? 4 + static_cast<int>(uniform_below(rng, 2)) : 1 + static_cast<int>(uniform_below(rng, 2));
            if (chance(rng, config_.answer_noise)) {
                answer += answer > 3 ? -1 : 1;
            }
            if (!high && chance(rng, drift)) {
                answer += item.reversed ? -1 : 1; // one step toward the high pole
            }
            answer = std::clamp(answer, 1, 5);
            out += "(" + std::string(item.letter) + ") " + std::to_string(answer) + "\n";
        }
        return out;
    }

    std::string story(const PersonaProfile &profile, std::string_view partner, bool interactive,
                      std::mt19937_64 &rng) const {
        const auto &lex = kLexicon;
        std::vector<std::string_view> creative_words(lex.posemo.begin(), lex.posemo.end());
        creative_words.insert(creative_words.end(), lex.incl.begin(), lex.incl.end());
        std::vector<std::string_view> analytical_words(lex.negemo.begin(), lex.negemo.end());
        analytical_words.insert(analytical_words.end(), lex.discrep.begin(), lex.discrep.end());
        const bool creative = profile.group == Group::Creative;
        const auto &own = creative ? creative_words : analytical_words;
        const auto &other = creative ? analytical_words : creative_words;

        std::vector<std::string> borrowed;
        if (interactive) {
            std::set<std::string_view> signal(creative_words.begin(), creative_words.end());
            signal.insert(analytical_words.begin(), analytical_words.end());
            std::string word;
            for (char c : std::string(partner) + " ") {
                if (std::isalpha(static_cast<unsigned char>(c))) {
                    word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
                } else if (!word.empty()) {
                    if (signal.contains(word)) borrowed.push_back(word);
                    word.clear();
                }
            }
        }

        const bool short_story = chance(rng, config_.short_story_rate);
        const int lo = short_story ? 200 : config_.story_min_words;
        const int hi = short_story ? 450 : config_.story_max_words;
        const int target = lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(std::max(1, hi - lo + 1))));

        std::string out;
        int in_sentence = 0;
        int sentence_len = 8 + static_cast<int>(uniform_below(rng, 7));
        for (int n = 0; n < target; ++n) {
            std::string word;
            if (chance(rng, 0.35)) {
                word = pick(lex.function_words, rng);
            } else if (chance(rng, config_.signal_fraction)) {
                if (!borrowed.empty() && chance(rng, config_.alignment)) {
                    word = borrowed[uniform_below(rng, borrowed.size())];
                } else if (chance(rng, config_.cross_fraction)) {
                    word = pick(other, rng);
                } else {
                    word = pick(own, rng);
                }
            } else {
                word = pick(lex.neutral, rng);
            }
            if (in_sentence == 0) {
                word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
            }
            ++in_sentence;
            const bool end = in_sentence == sentence_len || n + 1 == target;
            if (!out.empty()) out += ' ';
            out += word;
            if (end) {
                out += '.';
                in_sentence = 0;
                sentence_len = 8 + static_cast<int>(uniform_below(rng, 7));
            }
        }
        return out;
    }

    std::vector<PersonaProfile> profiles_;
    SyntheticMockConfig config_;
};

} // namespace

const MockLexicon &mock_lexicon() noexcept { return kLexicon; }

Responder make_synthetic_responder(std::vector<PersonaProfile> profiles, SyntheticMockConfig config) {
    return SyntheticResponder(std::move(profiles), config);
}

} // namespace persona_lab

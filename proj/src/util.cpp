#include "persona_lab/util.hpp"

#include "persona_lab/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace persona_lab {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::Config: return "ConfigError";
    case Errc::AlreadyExists: return "AlreadyExists";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::ScriptMiss: return "ScriptMiss";
    case Errc::StoreCorrupt: return "StoreCorrupt";
    case Errc::IncompleteSheet: return "IncompleteSheet";
    case Errc::OutOfRangeAnswer: return "OutOfRangeAnswer";
    case Errc::DuplicateLetter: return "DuplicateLetter";
    case Errc::PersistentlyMalformed: return "PersistentlyMalformed";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::UnknownCategoryRef: return "UnknownCategoryRef";
    case Errc::BadEntryLine: return "BadEntryLine";
    case Errc::EmptyDocument: return "EmptyDocument";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::CorruptRun: return "CorruptRun";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::SingleClass: return "SingleClass";
    case Errc::ConstantSequence: return "ConstantSequence";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::NonFinite: return "NonFinite";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::MissingPhase: return "MissingPhase";
    case Errc::PhaseMismatch: return "PhaseMismatch";
    case Errc::DataQuality: return "DataQuality";
    }
    return "Unknown";
}

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0";
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double value, int decimals) {
    if (!std::isfinite(value)) {
        return format_double(value);
    }
    std::array<char, 128> buf{};
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
    std::string out(buf.data(), res.ptr);
    // "-0.000" reads as a sign flip in tables
    if (out.starts_with('-') && out.find_first_not_of("-0.") == std::string::npos) {
        out.erase(0, 1);
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0x0f]);
    }
    return out;
}

std::uint64_t sha256_u64(std::string_view data) {
    const auto hex = sha256_hex(data);
    std::uint64_t value = 0;
    std::from_chars(hex.data(), hex.data() + 16, value, 16);
    return value;
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Config, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path &path, std::string_view contents) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::Config, "cannot write " + path.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw Error(Errc::Config, "short write to " + path.string());
    }
}

std::string_view trim_right(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string_view trim(std::string_view s) {
    s = trim_right(s);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (nl == std::string_view::npos) {
            if (!line.empty()) {
                lines.push_back(line);
            }
            break;
        }
        lines.push_back(line);
        start = nl + 1;
    }
    return lines;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::size_t count_words(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word) {
            ++count;
        }
        in_word = !space;
    }
    return count;
}

std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t bound) {
    if (bound <= 1) {
        return 0;
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) {
        draw = rng();
    }
    return draw % bound;
}

double uniform_unit(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace persona_lab

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace persona_lab {

/// Shortest round-trip decimal form; stable across runs and platforms.
std::string format_double(double value);
std::string format_fixed(double value, int decimals);

std::string sha256_hex(std::string_view data);
/// First 16 hex digits of the SHA-256 digest as an integer, for seeding.
std::uint64_t sha256_u64(std::string_view data);

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view contents);

std::string_view trim_right(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view text);

/// Quote a CSV field when it contains a separator, quote or newline.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split(std::string_view line);

/// Whitespace-delimited word count, used for the story length filter.
std::size_t count_words(std::string_view text);

/// Uniform integer in [0, bound) by rejection sampling on raw engine output.
/// std::uniform_int_distribution is implementation-defined, this is not.
std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t bound);
double uniform_unit(std::mt19937_64 &rng);

template <typename T> void seeded_shuffle(std::vector<T> &items, std::mt19937_64 &rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace persona_lab

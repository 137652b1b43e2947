#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bct/error.hpp"

namespace bct {

using symbol_t = std::uint32_t;

/// Finite alphabet {0, ..., m-1}, m >= 2. Default-constructs as binary.
struct Alphabet {
    std::uint32_t m = 2;

    Alphabet() = default;
    explicit Alphabet(std::uint32_t size) : m(size) {
        if (m < 2) throw data_error("alphabet size must be >= 2, got " + std::to_string(m));
    }

    double log_size() const;
    bool contains(symbol_t s) const { return s < m; }
};

/// Validated symbol series with an optional initial context.
/// The context is stored in time order: context.back() immediately precedes
/// symbols.front().
struct Sequence {
    Alphabet alphabet;
    std::vector<symbol_t> symbols;
    std::vector<symbol_t> initial_context;

    Sequence(Alphabet a, std::vector<symbol_t> syms, std::vector<symbol_t> ctx = {});

    std::size_t size() const { return symbols.size(); }
};

enum class SeparatorPolicy {
    Auto,        ///< separated if any separator appears between tokens
    Contiguous,  ///< single-digit symbols, m <= 10
    Separated,   ///< whitespace/comma separated integers
};

/// Parse text into a Sequence; rejects out-of-alphabet symbols with the
/// offending position, and empty input.
Sequence parse_sequence(std::string_view text, std::uint32_t m,
                        SeparatorPolicy policy = SeparatorPolicy::Auto);

/// Canonical text form: contiguous digits for m <= 10 plus trailing newline,
/// space-separated otherwise. parse(serialize(x)) == x.
std::string serialize_sequence(const Sequence& x);

/// Ternary price quantizer: symbol i compares value[i+1] with value[i]
/// (0 down, 1 same, 2 up). Exact equality counts as "same".
Sequence quantize_ternary(const std::vector<double>& values);

/// One real value per line; blank lines ignored.
std::vector<double> parse_value_series(std::string_view text);

}  // namespace bct

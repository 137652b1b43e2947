#include "bct/sequence.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace bct {

double Alphabet::log_size() const { return std::log(static_cast<double>(m)); }

Sequence::Sequence(Alphabet a, std::vector<symbol_t> syms, std::vector<symbol_t> ctx)
    : alphabet(a), symbols(std::move(syms)), initial_context(std::move(ctx)) {
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (!alphabet.contains(symbols[i]))
            throw data_error("symbol " + std::to_string(symbols[i]) + " at position " +
                             std::to_string(i) + " >= alphabet size " + std::to_string(alphabet.m));
    }
    for (symbol_t s : initial_context) {
        if (!alphabet.contains(s))
            throw data_error("initial context symbol " + std::to_string(s) +
                             " >= alphabet size " + std::to_string(alphabet.m));
    }
}

namespace {

bool is_separator(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',' || c == ';';
}

Sequence parse_contiguous(std::string_view text, std::uint32_t m) {
    if (m > 10)
        throw data_error("contiguous format requires alphabet size <= 10, got " + std::to_string(m));
    std::vector<symbol_t> syms;
    syms.reserve(text.size());
    for (char c : text) {
        if (is_separator(c)) continue;
        if (c < '0' || c > '9')
            throw data_error(std::string("invalid character '") + c + "' at position " +
                             std::to_string(syms.size()));
        const symbol_t s = static_cast<symbol_t>(c - '0');
        if (s >= m)
            throw data_error("symbol " + std::to_string(s) + " at position " +
                             std::to_string(syms.size()) + " >= alphabet size " + std::to_string(m));
        syms.push_back(s);
    }
    if (syms.empty()) throw data_error("empty input sequence");
    return Sequence(Alphabet(m), std::move(syms));
}

Sequence parse_separated(std::string_view text, std::uint32_t m) {
    std::vector<symbol_t> syms;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_separator(text[i])) ++i;
        if (i >= text.size()) break;
        std::size_t j = i;
        while (j < text.size() && !is_separator(text[j])) ++j;
        const std::string_view tok = text.substr(i, j - i);
        long long value = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw data_error("invalid token '" + std::string(tok) + "' at position " +
                             std::to_string(syms.size()));
        if (value < 0 || value >= static_cast<long long>(m))
            throw data_error("symbol " + std::to_string(value) + " at position " +
                             std::to_string(syms.size()) + (value < 0 ? " is negative" : (" >= alphabet size " + std::to_string(m))));
        syms.push_back(static_cast<symbol_t>(value));
        i = j;
    }
    if (syms.empty()) throw data_error("empty input sequence");
    return Sequence(Alphabet(m), std::move(syms));
}

}  // namespace

Sequence parse_sequence(std::string_view text, std::uint32_t m, SeparatorPolicy policy) {
    if (policy == SeparatorPolicy::Contiguous) return parse_contiguous(text, m);
    if (policy == SeparatorPolicy::Separated) return parse_separated(text, m);
    // Auto: separated when a separator appears between non-separator tokens.
    bool seen_token = false;
    bool separated = false;
    bool pending_gap = false;
    for (char c : text) {
        if (is_separator(c)) {
            if (seen_token) pending_gap = true;
        } else {
            if (pending_gap) {
                separated = true;
                break;
            }
            seen_token = true;
        }
    }
    if (separated || m > 10) return parse_separated(text, m);
    return parse_contiguous(text, m);
}

std::string serialize_sequence(const Sequence& x) {
    std::string out;
    if (x.alphabet.m <= 10) {
        out.reserve(x.symbols.size() + 1);
        for (symbol_t s : x.symbols) out.push_back(static_cast<char>('0' + s));
    } else {
        for (std::size_t i = 0; i < x.symbols.size(); ++i) {
            if (i > 0) out.push_back(' ');
            out += std::to_string(x.symbols[i]);
        }
    }
    out.push_back('\n');
    return out;
}

Sequence quantize_ternary(const std::vector<double>& values) {
    if (values.size() < 2)
        throw data_error("quantizer needs at least 2 values, got " + std::to_string(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw data_error("non-finite value at line " + std::to_string(i + 1));
    }
    std::vector<symbol_t> syms(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i + 1] < values[i])
            syms[i] = 0;
        else if (values[i + 1] > values[i])
            syms[i] = 2;
        else
            syms[i] = 1;
    }
    return Sequence(Alphabet(3), std::move(syms));
}

std::vector<double> parse_value_series(std::string_view text) {
    std::vector<double> values;
    std::size_t i = 0;
    std::size_t line = 1;
    while (i < text.size()) {
        std::size_t j = i;
        while (j < text.size() && text[j] != '\n') ++j;
        std::string_view tok = text.substr(i, j - i);
        while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t' || tok.front() == '\r'))
            tok.remove_prefix(1);
        while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
            tok.remove_suffix(1);
        if (!tok.empty()) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size())
                throw data_error("invalid value '" + std::string(tok) + "' at line " +
                                 std::to_string(line));
            values.push_back(v);
        }
        i = j + 1;
        ++line;
    }
    return values;
}

}  // namespace bct

#include "bct/chain_io.hpp"

#include <sstream>

#include "bct/error.hpp"
#include "bct/report.hpp"

namespace bct {

std::string chain_to_text(const ChainFile& file) {
    file.spec.validate();
    std::string out = "format-version 1\n";
    out += "m " + std::to_string(file.spec.alphabet.m) + "\n";
    if (file.entropy) out += "entropy " + format_double(*file.entropy) + "\n";
    if (file.seed) out += "seed " + std::to_string(*file.seed) + "\n";
    if (file.length) out += "length " + std::to_string(*file.length) + "\n";
    for (std::size_t i = 0; i < file.spec.tree.leaf_count(); ++i) {
        out += "leaf " + format_context(file.spec.tree.leaves[i], file.spec.alphabet.m);
        for (const double p : file.spec.params.row(i)) out += " " + format_double(p);
        out += "\n";
    }
    return out;
}

std::string chain_to_text(const ChainSpec& spec, std::optional<double> entropy) {
    return chain_to_text(ChainFile{spec, entropy, std::nullopt, std::nullopt});
}

ChainFile chain_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    ChainFile file;
    std::uint32_t m = 0;
    bool saw_version = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string tag;
        fields >> tag;
        const auto fail = [&](const std::string& what) -> Error {
            return data_error("chain file line " + std::to_string(line_no) + ": " + what);
        };
        if (tag == "format-version") {
            std::string v;
            fields >> v;
            if (v != "1") throw fail("unsupported format-version '" + v + "'");
            saw_version = true;
        } else if (tag == "m") {
            long long v = 0;
            if (!(fields >> v) || v < 2) throw fail("m must be an integer >= 2");
            m = static_cast<std::uint32_t>(v);
            file.spec.alphabet = Alphabet{m};
            file.spec.params.m = m;
        } else if (tag == "entropy") {
            std::string v;
            fields >> v;
            file.entropy = parse_double(v);
        } else if (tag == "seed" || tag == "length") {
            unsigned long long v = 0;
            if (!(fields >> v)) throw fail(tag + " must be a non-negative integer");
            (tag == "seed" ? file.seed : file.length) = v;
        } else if (tag == "leaf") {
            if (m == 0) throw fail("leaf before m");
            std::string ctx;
            fields >> ctx;
            file.spec.tree.leaves.push_back(parse_context(ctx, m));
            std::string v;
            std::uint32_t got = 0;
            while (fields >> v) {
                file.spec.params.theta.push_back(parse_double(v));
                ++got;
            }
            if (got != m)
                throw fail("leaf row has " + std::to_string(got) + " probabilities, expected " +
                           std::to_string(m));
        } else {
            throw fail("unknown tag '" + tag + "'");
        }
    }
    if (!saw_version) throw data_error("chain file: missing format-version line");
    if (m == 0) throw data_error("chain file: missing m line");
    if (file.spec.tree.leaves.empty()) throw data_error("chain file: no leaf lines");
    file.spec.validate();
    return file;
}

void write_chain_file(const std::string& path, const ChainFile& file) {
    write_text_file(path, chain_to_text(file));
}

void write_chain_file(const std::string& path, const ChainSpec& spec,
                      std::optional<double> entropy) {
    write_text_file(path, chain_to_text(spec, entropy));
}

ChainFile read_chain_file(const std::string& path) {
    try {
        return chain_from_text(read_text_file(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Data)
            throw data_error(std::string(e.what()) + " [" + path + "]");
        throw;
    }
}

std::string sample_to_line(const JointSample& sample, std::uint32_t m) {
    std::string out;
    for (std::size_t i = 0; i < sample.tree.leaves.size(); ++i) {
        if (i > 0) out += ';';
        out += format_context(sample.tree.leaves[i], m);
    }
    out += '|';
    for (std::size_t i = 0; i < sample.params.theta.size(); ++i) {
        if (i > 0) out += ' ';
        out += format_double(sample.params.theta[i]);
    }
    out += '|';
    out += format_double(sample.entropy);
    return out;
}

JointSample sample_from_line(const std::string& line, std::uint32_t m) {
    const auto bar1 = line.find('|');
    const auto bar2 = line.rfind('|');
    if (bar1 == std::string::npos || bar2 == bar1)
        throw data_error("sample record needs two '|' separators");
    JointSample sample;

    const std::string tree_part = line.substr(0, bar1);
    std::istringstream leaves(tree_part);
    std::string ctx;
    while (std::getline(leaves, ctx, ';'))
        sample.tree.leaves.push_back(parse_context(ctx, m));
    if (sample.tree.leaves.empty()) throw data_error("sample record has no leaves");

    sample.params.m = m;
    std::istringstream values(line.substr(bar1 + 1, bar2 - bar1 - 1));
    std::string v;
    while (values >> v) sample.params.theta.push_back(parse_double(v));
    if (sample.params.theta.size() != sample.tree.leaf_count() * m)
        throw data_error("sample record has " + std::to_string(sample.params.theta.size()) +
                         " theta values for " + std::to_string(sample.tree.leaf_count()) +
                         " leaves");

    sample.entropy = parse_double(line.substr(bar2 + 1));
    sample.method = EntropyMethod::Unfilled;
    return sample;
}

}  // namespace bct

#pragma once

#include <optional>
#include <string>

#include "bct/posterior.hpp"
#include "bct/tree_model.hpp"

namespace bct {

/// A chain spec plus the optional metadata carried by fixture files and
/// simulation sidecars: pinned entropy, generating seed, sequence length.
struct ChainFile {
    ChainSpec spec;
    std::optional<double> entropy;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> length;
};

/// Text form: format-version, m, optional metadata tags, one
/// "leaf <ctx> <theta...>" line per leaf. Round-trips exactly (shortest
/// round-trip decimals).
std::string chain_to_text(const ChainFile& file);
std::string chain_to_text(const ChainSpec& spec, std::optional<double> entropy = std::nullopt);
ChainFile chain_from_text(const std::string& text);

void write_chain_file(const std::string& path, const ChainFile& file);
void write_chain_file(const std::string& path, const ChainSpec& spec,
                      std::optional<double> entropy = std::nullopt);
ChainFile read_chain_file(const std::string& path);

/// One posterior draw as a line: "<leaf;...>|<theta ...>|<H>".
std::string sample_to_line(const JointSample& sample, std::uint32_t m);
JointSample sample_from_line(const std::string& line, std::uint32_t m);

}  // namespace bct

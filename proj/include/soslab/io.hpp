#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace soslab {

// 17-significant-digit decimal, enough to round-trip a double exactly
std::string fmt17(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string str() const;
};

// write-to-temp-then-rename; throws std::runtime_error with path context
void writeTextAtomic(const std::string& path, const std::string& content);
// throws std::runtime_error with path context
std::string readFile(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace soslab

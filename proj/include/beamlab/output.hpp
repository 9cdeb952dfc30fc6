#pragma once

#include <string>
#include <vector>

#include "beamlab/config.hpp"

namespace beamlab {

/// CSV with a header row and 17-significant-digit floats; resolved config is
/// embedded as leading comment lines so every output is self-describing.
class CsvWriter {
public:
    CsvWriter(std::string path, const ExperimentConfig& cfg, std::vector<std::string> columns);
    void row(const std::vector<double>& values);
    void flush();
    std::size_t rows_written() const { return rows_; }

private:
    std::string path_;
    std::string text_;
    std::size_t rows_ = 0;
    std::size_t ncols_ = 0;
};

void write_text_file(const std::string& path, const std::string& text);
std::string format_g17(double v);

}  // namespace beamlab

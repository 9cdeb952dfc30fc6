#include "beamlab/output.hpp"

#include <cstdio>
#include <fstream>

namespace beamlab {

std::string format_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::string path, const ExperimentConfig& cfg, std::vector<std::string> columns)
    : path_(std::move(path)), ncols_(columns.size())
{
    text_ += "# config " + cfg.metadata_json() + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        text_ += (i ? "," : "") + columns[i];
    text_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values)
{
    if (values.size() != ncols_) throw ValidationError("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        text_ += (i ? "," : "") + format_g17(values[i]);
    text_ += "\n";
    ++rows_;
}

void CsvWriter::flush()
{
    write_text_file(path_, text_);
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file \"" + path + "\"");
    out << text;
}

}  // namespace beamlab

#include "pbl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pbl {

namespace fs = std::filesystem;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_field(const Field2D& f, const fs::path& stem) {
    std::string body;
    body.reserve(f.values.size() * 60);
    body += "x,y,value\n";
    for (std::size_t i = 0; i < f.nx(); ++i)
        for (std::size_t j = 0; j < f.ny(); ++j) {
            body += fmt17(f.x(i));
            body += ',';
            body += fmt17(f.y(j));
            body += ',';
            body += fmt17(f(i, j));
            body += '\n';
        }
    fs::path csv = stem;
    csv += ".csv";
    write_atomic(csv, body);

    json desc = {{"frame", to_string(f.frame)},
                 {"quantity_name", f.name},
                 {"nx", f.nx()},
                 {"ny", f.ny()},
                 {"stretch_law", to_string(f.grid->stretch)},
                 {"stencil_order", f.grid->stencil_order},
                 {"warnings", f.warnings}};
    fs::path js = stem;
    js += ".json";
    write_atomic(js, desc.dump(2) + "\n");
}

Field2D read_field(const fs::path& stem) {
    fs::path js = stem;
    js += ".json";
    std::ifstream din(js);
    if (!din) throw std::runtime_error("missing descriptor " + js.string());
    json desc = json::parse(din);
    std::size_t nx = desc.at("nx"), ny = desc.at("ny");

    fs::path csv = stem;
    csv += ".csv";
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("missing " + csv.string());
    std::string line;
    std::getline(in, line);
    if (line != "x,y,value") throw std::runtime_error("bad header in " + csv.string());
    std::vector<double> xs(nx), ys(ny), vals(nx * ny);
    for (std::size_t k = 0; k < nx * ny; ++k) {
        if (!std::getline(in, line)) throw std::runtime_error("truncated " + csv.string());
        double a, b, c;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3)
            throw std::runtime_error("bad row in " + csv.string());
        xs[k / ny] = a;
        ys[k % ny] = b;
        vals[k] = c;
    }
    auto g = grid_from_nodes(xs, ys, parse_stretch(desc.at("stretch_law")),
                             desc.value("stencil_order", 2));
    Field2D f(g, parse_frame(desc.at("frame")), desc.at("quantity_name"));
    f.values = std::move(vals);
    return f;
}

void write_columns(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
    std::ostringstream os;
    for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << '\n';
    std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << fmt17(columns[c][r]);
        os << '\n';
    }
    write_atomic(path, os.str());
}

}  // namespace pbl

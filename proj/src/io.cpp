#include "afcsim/io.hpp"

#include "afcsim/error.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace afcsim {

void OutputSet::add(const std::string& name, std::string content)
{
    for (auto& f : files_) {
        if (f.first == name) {
            f.second = std::move(content);
            return;
        }
    }
    files_.emplace_back(name, std::move(content));
}

const std::string* OutputSet::find(const std::string& name) const
{
    for (const auto& f : files_) {
        if (f.first == name) {
            return &f.second;
        }
    }
    return nullptr;
}

void OutputSet::commit(const std::string& dir) const
{
    namespace fs = std::filesystem;
    std::error_code ec;
    const bool existed = fs::exists(dir, ec);
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir + "': " + ec.message());
    }
    std::vector<std::pair<fs::path, fs::path>> staged;
    std::vector<fs::path> moved;
    auto rollback = [&] {
        for (const auto& s : staged) {
            fs::remove(s.first, ec);
        }
        for (const auto& m : moved) {
            fs::remove(m, ec);
        }
        if (!existed && fs::is_empty(dir, ec)) {
            fs::remove(dir, ec);
        }
    };
    for (const auto& [name, content] : files_) {
        const fs::path target = fs::path(dir) / name;
        if (fs::is_directory(target, ec)) {
            rollback();
            throw Error("cannot write '" + target.string() + "': a directory is in the way");
        }
        const fs::path tmp = fs::path(dir) / ("." + name + ".partial");
        std::ofstream out(tmp, std::ios::binary);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out) {
            fs::remove(tmp, ec);
            rollback();
            throw Error("cannot write '" + target.string() + "'");
        }
        staged.emplace_back(tmp, target);
    }
    while (!staged.empty()) {
        const auto [tmp, target] = staged.front();
        fs::rename(tmp, target, ec);
        if (ec) {
            rollback();
            throw Error("cannot move output into place: '" + target.string() + "'");
        }
        staged.erase(staged.begin());
        moved.push_back(target);
    }
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string spectrum_csv(const Spectrum& s)
{
    std::string out = "detuning_mhz,od,pop_g1,pop_g2,pop_exc\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += format_number(s.grid.at(i)) + ',' + format_number(s.od[i]) + ',' + format_number(s.pop_g1[i]) + ',' +
               format_number(s.pop_g2[i]) + ',' + format_number(s.pop_exc[i]) + '\n';
    }
    return out;
}

std::string trace_csv(const EchoTrace& t, std::size_t stride)
{
    std::string out = "time_ns,input,output\n";
    const std::size_t step = std::max<std::size_t>(1, stride);
    for (std::size_t j = 0; j < t.time_ns.size(); j += step) {
        out += format_number(t.time_ns[j]) + ',' + format_number(t.input[j]) + ',' + format_number(t.output[j]) + '\n';
    }
    return out;
}

std::string map_csv(const MismatchMap& m)
{
    std::string out = m.axis == SpacingAxis::storage_time_ns ? "field_g,storage_time_ns,mismatch\n"
                                                              : "field_g,spacing_mhz,mismatch\n";
    out.reserve(out.size() + m.values.size() * 24);
    for (std::size_t i = 0; i < m.field_g.size(); ++i) {
        for (std::size_t j = 0; j < m.second.size(); ++j) {
            out += format_number(m.field_g[i]) + ',' + format_number(m.second[j]) + ',' + format_number(m.at(i, j)) +
                   '\n';
        }
    }
    return out;
}

std::string pattern_csv(const HolePattern& p)
{
    std::string out = "offset_mhz,kind,weight\n";
    for (const auto& f : p.features) {
        out += format_number(f.offset_mhz) + ',' + (f.kind == FeatureKind::hole ? "hole" : "antihole") + ',' +
               format_number(f.weight) + '\n';
    }
    return out;
}

} // namespace afcsim

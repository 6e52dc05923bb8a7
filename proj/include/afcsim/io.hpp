#pragma once

#include "afcsim/afc.hpp"
#include "afcsim/commensurate.hpp"
#include "afcsim/material.hpp"
#include "afcsim/spectrum.hpp"

#include <string>
#include <utility>
#include <vector>

namespace afcsim {

// Files of one command, held in memory until every result is ready so that
// a failing run leaves nothing behind.
class OutputSet {
public:
    void add(const std::string& name, std::string content);
    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
    const std::string* find(const std::string& name) const;

    // Writes every file into `dir` (created if needed). Each file is first
    // written under a temporary name and renamed once all writes succeeded.
    void commit(const std::string& dir) const;

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

// Fixed, locale-independent number formatting used by every CSV writer.
std::string format_number(double v);

// detuning_mhz,od,pop_g1,pop_g2,pop_exc
std::string spectrum_csv(const Spectrum& s);
// time_ns,input,output
std::string trace_csv(const EchoTrace& t, std::size_t stride = 1);
// field_g,<storage_time_ns|spacing_mhz>,mismatch
std::string map_csv(const MismatchMap& m);
// offset_mhz,kind,weight
std::string pattern_csv(const HolePattern& p);

} // namespace afcsim

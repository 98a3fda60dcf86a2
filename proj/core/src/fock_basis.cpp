#include <algorithm>
#include <cmath>
#include <sstream>

#include "qedvar/error.hpp"
#include "qedvar/oracle.hpp"

namespace qedvar {

namespace {

std::string encode(const std::vector<FockBasis::Entry>& sparse) {
    std::string key;
    key.reserve(sparse.size() * 3);
    for (const auto& e : sparse) {
        key.push_back(static_cast<char>(e.mode & 0xff));
        key.push_back(static_cast<char>((e.mode >> 8) & 0xff));
        key.push_back(static_cast<char>(e.count));
    }
    return key;
}

}  // namespace

std::string to_string(Truncation t) { return t == Truncation::total ? "total" : "per_mode"; }

Truncation truncation_from_string(const std::string& name) {
    if (name == "total") return Truncation::total;
    if (name == "per_mode") return Truncation::per_mode;
    throw Error(ErrorKind::invalid_input, "unknown truncation '" + name + "' (expected total or per_mode)");
}

double FockBasis::count_states(int n_matter, int n_modes, int max_photons, Truncation truncation) {
    if (truncation == Truncation::per_mode) return n_matter * std::pow(max_photons + 1.0, n_modes);
    // C(M + P, P)
    double c = 1.0;
    for (int i = 1; i <= max_photons; ++i) c = c * (n_modes + i) / i;
    return n_matter * std::round(c);
}

FockBasis::FockBasis(int n_matter, int n_modes, int max_photons, Truncation truncation, std::size_t state_budget)
    : n_matter_(n_matter), n_modes_(n_modes), max_photons_(max_photons), truncation_(truncation) {
    if (n_matter < 1 || n_modes < 1 || max_photons < 0)
        throw Error(ErrorKind::invalid_input, "Fock basis needs n_matter >= 1, n_modes >= 1, max_photons >= 0");
    if (n_modes > 65535 || max_photons > 255)
        throw Error(ErrorKind::invalid_input, "Fock basis limited to 65535 modes and 255 photons");
    const double expected = count_states(n_matter, n_modes, max_photons, truncation);
    if (expected > static_cast<double>(state_budget)) {
        std::ostringstream msg;
        msg << "Fock basis of " << expected << " states (n_matter=" << n_matter << ", modes=" << n_modes
            << ", max_photons=" << max_photons << ", " << to_string(truncation) << ") exceeds the budget of "
            << state_budget << " states";
        throw Error(ErrorKind::resource, msg.str());
    }

    offsets_.push_back(0);
    std::vector<Entry> current;
    auto recurse = [&](auto&& self, int mode, int remaining) -> void {
        if (mode == n_modes_) {
            index_.emplace(encode(current), static_cast<std::uint32_t>(offsets_.size() - 1));
            int total = 0;
            for (const auto& e : current) {
                entries_.push_back(e);
                total += static_cast<int>(e.count);
            }
            totals_.push_back(static_cast<std::uint8_t>(total));
            offsets_.push_back(entries_.size());
            return;
        }
        const int cap = truncation_ == Truncation::total ? remaining : max_photons_;
        for (int c = 0; c <= cap; ++c) {
            if (c > 0) current.push_back({static_cast<std::uint32_t>(mode), static_cast<std::uint32_t>(c)});
            self(self, mode + 1, remaining - c);
            if (c > 0) current.pop_back();
        }
    };
    recurse(recurse, 0, max_photons_);

    const std::size_t count = photon_count();
    lowered_.resize(entries_.size());
    raise_row_.assign(count, -1);
    std::vector<Entry> work;
    for (std::size_t j = 0; j < count; ++j) {
        const auto occ = occupation(j);
        for (std::size_t k = 0; k < occ.size(); ++k) {
            work.assign(occ.begin(), occ.end());
            if (--work[k].count == 0) work.erase(work.begin() + static_cast<long>(k));
            lowered_[offsets_[j] + k] = static_cast<std::uint32_t>(lookup(work));
        }

        bool can_raise = truncation_ == Truncation::total ? totals_[j] < max_photons_ : true;
        if (!can_raise) continue;
        std::vector<std::int64_t> targets(static_cast<std::size_t>(n_modes_), -1);
        bool any = false;
        for (int m = 0; m < n_modes_; ++m) {
            work.assign(occ.begin(), occ.end());
            auto it = std::find_if(work.begin(), work.end(), [m](const Entry& e) { return e.mode == static_cast<std::uint32_t>(m); });
            if (it != work.end()) {
                if (truncation_ == Truncation::per_mode && static_cast<int>(it->count) >= max_photons_) continue;
                ++it->count;
            } else {
                if (max_photons_ == 0) continue;
                auto pos = std::find_if(work.begin(), work.end(), [m](const Entry& e) { return e.mode > static_cast<std::uint32_t>(m); });
                work.insert(pos, Entry{static_cast<std::uint32_t>(m), 1});
            }
            targets[static_cast<std::size_t>(m)] = lookup(work);
            any = true;
        }
        if (!any) continue;
        raise_row_[j] = static_cast<std::int64_t>(raise_table_.size() / static_cast<std::size_t>(n_modes_));
        raise_table_.insert(raise_table_.end(), targets.begin(), targets.end());
    }
}

std::int64_t FockBasis::lookup(const std::vector<Entry>& sparse) const {
    auto it = index_.find(encode(sparse));
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::span<const FockBasis::Entry> FockBasis::occupation(std::size_t j) const {
    return {entries_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
}

std::span<const std::uint32_t> FockBasis::lowered(std::size_t j) const {
    return {lowered_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
}

std::int64_t FockBasis::raised(std::size_t j, int mode) const {
    const std::int64_t row = raise_row_[j];
    if (row < 0) return -1;
    return raise_table_[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_modes_) + static_cast<std::size_t>(mode)];
}

FockBasis::State FockBasis::state(std::size_t index) const {
    if (index >= size()) throw Error(ErrorKind::invalid_input, "Fock index out of range");
    State s;
    s.matter = static_cast<int>(index % static_cast<std::size_t>(n_matter_));
    s.occupation.assign(static_cast<std::size_t>(n_modes_), 0);
    for (const auto& e : occupation(index / static_cast<std::size_t>(n_matter_)))
        s.occupation[e.mode] = static_cast<int>(e.count);
    return s;
}

std::size_t FockBasis::index_of(int matter, std::span<const int> occ) const {
    if (matter < 0 || matter >= n_matter_ || occ.size() != static_cast<std::size_t>(n_modes_))
        throw Error(ErrorKind::invalid_input, "state shape does not match the Fock basis");
    std::vector<Entry> sparse;
    for (std::size_t m = 0; m < occ.size(); ++m) {
        if (occ[m] < 0) throw Error(ErrorKind::invalid_input, "negative occupation");
        if (occ[m] > 255) throw Error(ErrorKind::invalid_input, "state outside the truncated Fock space");
        if (occ[m] > 0) sparse.push_back({static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(occ[m])});
    }
    const std::int64_t j = lookup(sparse);
    if (j < 0) throw Error(ErrorKind::invalid_input, "state outside the truncated Fock space");
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_matter_) + static_cast<std::size_t>(matter);
}

}  // namespace qedvar

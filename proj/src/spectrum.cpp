#include "ncl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ncl/parallel.hpp"

namespace ncl {

std::string half_str(int doubled) {
    if (doubled % 2 == 0) return std::to_string(doubled / 2);
    return std::to_string(doubled) + "/2";
}

namespace {

struct Groups {
    std::vector<Label> keys;
    std::vector<std::vector<int>> members;
};

Groups group_basis(const Basis& basis, const BlockKey& key) {
    std::map<Label, std::vector<int>> g;
    for (int i = 0; i < basis.size(); ++i) g[key(basis[i])].push_back(i);
    Groups out;
    for (auto& [k, v] : g) {
        out.keys.push_back(k);
        out.members.push_back(std::move(v));
    }
    return out;
}

DenseC sub_block(const LinOp& op, const std::vector<int>& idx) {
    const int s = static_cast<int>(idx.size());
    std::unordered_map<int, int> pos;
    for (int i = 0; i < s; ++i) pos[idx[i]] = i;
    DenseC m = DenseC::Zero(s, s);
    for (int i = 0; i < s; ++i)
        for (auto& e : op.col(idx[i])) {
            auto it = pos.find(e.row);
            if (it == pos.end()) throw LinearAlgebraError("block_spectrum: operator couples different blocks");
            m(it->second, i) = e.v;
        }
    return m;
}

bool value_less(cplx a, cplx b) {
    double aa = std::abs(a), ab = std::abs(b);
    if (aa != ab) return aa < ab;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

std::vector<SpectralLine> merge_lines(const Label& key, const std::string& name, std::vector<cplx> vals,
                                      std::vector<double> res, double merge_tol) {
    std::vector<size_t> order(vals.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return value_less(vals[a], vals[b]); });
    std::vector<SpectralLine> out;
    std::vector<char> used(vals.size(), 0);
    for (size_t oi = 0; oi < order.size(); ++oi) {
        size_t i = order[oi];
        if (used[i]) continue;
        SpectralLine l{key, name, vals[i], 1, res[i]};
        used[i] = 1;
        for (size_t oj = oi + 1; oj < order.size(); ++oj) {
            size_t j = order[oj];
            if (!used[j] && std::abs(vals[j] - vals[i]) <= merge_tol * std::max(1.0, std::abs(vals[i]))) {
                used[j] = 1;
                ++l.multiplicity;
                l.residual = std::max(l.residual, res[j]);
            }
        }
        out.push_back(l);
    }
    return out;
}

}  // namespace

SpectralReport block_spectrum(const LinOp& op, const Basis& basis, const BlockKey& key, const BlockName& name,
                              double tol, double merge_tol) {
    Groups g = group_basis(basis, key);
    const int nb = static_cast<int>(g.keys.size());
    std::vector<std::vector<SpectralLine>> per(static_cast<size_t>(nb));
    std::vector<char> flagged(static_cast<size_t>(nb), 0);
    parallel_for(nb, [&](int k) {
        EigResult er = eig_dense(sub_block(op, g.members[k]), tol);
        flagged[k] = er.flagged;
        per[k] = merge_lines(g.keys[k], name(g.keys[k]), er.eigenvalues, er.residuals, merge_tol);
    });
    SpectralReport r;
    for (int k = 0; k < nb; ++k) {
        r.flagged = r.flagged || flagged[k];
        for (auto& l : per[k]) {
            r.max_residual = std::max(r.max_residual, l.residual);
            r.lines.push_back(l);
        }
    }
    return r;
}

SpectralReport block_spectrum_hermitian(const LinOp& op, const Basis& basis, const BlockKey& key,
                                        const BlockName& name, double merge_tol) {
    Groups g = group_basis(basis, key);
    const int nb = static_cast<int>(g.keys.size());
    std::vector<std::vector<SpectralLine>> per(static_cast<size_t>(nb));
    parallel_for(nb, [&](int k) {
        DenseC m = sub_block(op, g.members[k]);
        HermitianEig he = eig_hermitian(m);
        std::vector<cplx> v(he.eigenvalues.begin(), he.eigenvalues.end());
        std::vector<double> res;
        for (int c = 0; c < static_cast<int>(v.size()); ++c)
            res.push_back((m * he.vectors.col(c) - v[c] * he.vectors.col(c)).norm());
        per[k] = merge_lines(g.keys[k], name(g.keys[k]), v, res, merge_tol);
    });
    SpectralReport r;
    for (auto& p : per)
        for (auto& l : p) {
            r.max_residual = std::max(r.max_residual, l.residual);
            r.lines.push_back(l);
        }
    return r;
}

std::vector<cplx> flatten(const SpectralReport& r) {
    std::vector<cplx> out;
    for (auto& l : r.lines)
        for (int k = 0; k < l.multiplicity; ++k) out.push_back(l.value);
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

}  // namespace ncl

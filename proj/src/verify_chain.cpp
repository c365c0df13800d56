#include "wlab/decompose.hpp"

#include "wlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace wlab {

int DecompositionChain::add(const Domain& piece, const Point& shift, std::vector<int> hint) {
    if (pieces.empty()) throw PreconditionError("DecompositionChain::add: set E_0 first");
    pieces.push_back(piece);
    shifts.push_back(shift);
    hints.resize(pieces.size());
    hints.back() = std::move(hint);
    return static_cast<int>(pieces.size()) - 1;
}

namespace {

// Uniform grid over the union of piece boxes; each cell lists the pieces whose box meets it.
class PieceIndex {
public:
    explicit PieceIndex(const std::vector<Domain>& pieces) : pieces_(pieces) {
        const int d = pieces[0].dim();
        box_ = pieces[0].bbox();
        for (const auto& p : pieces) box_ = Box::hull(box_, p.bbox());
        int per = std::clamp(static_cast<int>(std::ceil(2 * std::pow(static_cast<double>(pieces.size()), 1.0 / d))), 1,
                             d <= 2 ? 256 : 32);
        per_ = per;
        cells_.assign(static_cast<std::size_t>(std::pow(per, d)), {});
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            const Box& b = pieces[k].bbox();
            if (b.empty()) continue;
            std::vector<int> lo(d), hi(d);
            for (int i = 0; i < d; ++i) {
                lo[i] = cell_coord(b.lo[i], i);
                hi[i] = cell_coord(b.hi[i], i);
            }
            std::vector<int> c = lo;
            for (;;) {
                cells_[flat(c)].push_back(static_cast<int>(k));
                int i = 0;
                while (i < d && ++c[i] > hi[i]) c[i] = lo[i], ++i;
                if (i == d) break;
            }
        }
    }

    // true if x lies in some piece with index < limit; hint list is tried first
    bool covered(const Point& x, int limit, const std::vector<int>& hint) const {
        for (int i : hint)
            if (i < limit && pieces_[i].contains(x)) return true;
        if (!box_.contains(x, 1e-12)) return false;
        std::vector<int> c(x.size());
        for (int i = 0; i < x.size(); ++i) c[i] = cell_coord(x[i], i);
        for (int k : cells_[flat(c)]) {
            if (k >= limit) break;
            if (pieces_[k].contains(x)) return true;
        }
        return false;
    }

private:
    int cell_coord(double v, int i) const {
        double w = box_.hi[i] - box_.lo[i];
        if (w <= 0) return 0;
        int c = static_cast<int>(std::floor((v - box_.lo[i]) / w * per_));
        return std::clamp(c, 0, per_ - 1);
    }
    std::size_t flat(const std::vector<int>& c) const {
        std::size_t f = 0;
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) f = f * per_ + c[i];
        return f;
    }

    const std::vector<Domain>& pieces_;
    Box box_;
    int per_ = 1;
    std::vector<std::vector<int>> cells_;
};

bool exact_distance_available(const Domain& d) {
    switch (d.kind()) {
        case DomainKind::polytope:
        case DomainKind::ball: return true;
        case DomainKind::affine_image: return exact_distance_available(*d.as_affine().base);
        case DomainKind::intersection:
            for (const auto& m : d.as_set_list().members)
                if (!exact_distance_available(m)) return false;
            return true;
        default: return false;
    }
}

double box_distance(const Box& b, const Point& x) {
    double s = 0;
    for (int i = 0; i < x.size(); ++i) {
        double e = std::max({b.lo[i] - x[i], 0.0, x[i] - b.hi[i]});
        s += e * e;
    }
    return std::sqrt(s);
}

// Distance estimate from x to the union of pieces[0..limit).
double distance_to_union(const std::vector<Domain>& pieces, int limit, const Point& x) {
    double best = kInf;
    for (int i = 0; i < limit; ++i) {
        double bd = box_distance(pieces[i].bbox(), x);
        if (bd >= best) continue;
        double v = exact_distance_available(pieces[i]) ? std::max(0.0, signed_distance(pieces[i], x)) : bd;
        best = std::min(best, v);
    }
    return best;
}

}  // namespace

ChainReport verify_chain(const DecompositionChain& chain, const VerifyOptions& opt) {
    ChainReport rep;
    if (chain.pieces.empty()) throw PreconditionError("verify_chain: chain has no pieces");
    if (chain.shifts.size() + 1 != chain.pieces.size())
        throw PreconditionError("verify_chain: need one shift per piece after E_0");
    if (chain.r < 1) throw PreconditionError("verify_chain: order must be >= 1");
    const int d = chain.dim();
    for (const auto& p : chain.pieces) require_dim(d, p.dim(), "verify_chain");

    for (const auto& h : chain.shifts) {
        require_dim(d, static_cast<int>(h.size()), "verify_chain");
        if (!(h.norm() > 0) || (chain.dirset.size() > 0 && !chain.dirset.contains(h, 1e-12, true)))
            rep.shifts_in_dirset = false;
    }

    PieceIndex index(chain.pieces);
    const int m = chain.m();
    struct PieceOutcome {
        long samples = 0;
        bool empty = false;
        double worst = 0;
        std::vector<Point> bad;
    };
    std::vector<PieceOutcome> out(m + 1);
    static const std::vector<int> no_hint;
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t q) {
        const int k = static_cast<int>(q) + 1;
        Rng rng(Rng::derive(opt.seed, static_cast<std::uint64_t>(k)));
        auto pts = sample_points(chain.pieces[k], opt.samples_per_piece, rng);
        PieceOutcome& o = out[k];
        o.samples = static_cast<long>(pts.size());
        o.empty = pts.empty();
        const Point& h = chain.shifts[k - 1];
        const auto& hint = static_cast<std::size_t>(k) < chain.hints.size() ? chain.hints[k] : no_hint;
        for (const auto& x : pts)
            for (int j = 1; j <= chain.r; ++j) {
                Point y = x - j * h;
                if (index.covered(y, k, hint)) continue;
                double dist = distance_to_union(chain.pieces, k, y);
                o.worst = std::max(o.worst, dist);
                if (static_cast<int>(o.bad.size()) < opt.max_witnesses) o.bad.push_back(x);
            }
    });
    for (int k = 1; k <= m; ++k) {
        rep.samples += out[k].samples;
        rep.empty_pieces += out[k].empty;
        if (!out[k].bad.empty()) {
            rep.bad_pieces.push_back(k);
            rep.worst_violation = std::max(rep.worst_violation, out[k].worst);
            for (const auto& w : out[k].bad)
                if (static_cast<int>(rep.witnesses.size()) < opt.max_witnesses) rep.witnesses.push_back(w);
        }
    }
    if (chain.target.valid() && opt.coverage_samples > 0) {
        rep.coverage_miss = chain_coverage_miss(chain, chain.target, opt.coverage_samples, opt.seed ^ 0xc0ffee);
        rep.coverage_ok = rep.coverage_miss <= opt.coverage_tolerance;
    }
    rep.ok = rep.bad_pieces.empty() && rep.shifts_in_dirset && rep.coverage_ok;
    return rep;
}

double chain_coverage_miss(const DecompositionChain& chain, const Domain& target, int n, std::uint64_t seed) {
    if (n <= 0) return 0;
    PieceIndex index(chain.pieces);
    const int chunks = 16;
    std::vector<long> miss(chunks, 0), got(chunks, 0);
    const int m = static_cast<int>(chain.pieces.size());
    parallel_for(chunks, [&](std::size_t c) {
        Rng rng(Rng::derive(seed, c));
        int share = n / chunks + (static_cast<int>(c) < n % chunks ? 1 : 0);
        auto pts = sample_points(target, share, rng);
        got[c] = static_cast<long>(pts.size());
        for (const auto& x : pts)
            if (!index.covered(x, m, {})) ++miss[c];
    });
    long mt = 0, gt = 0;
    for (int c = 0; c < chunks; ++c) {
        mt += miss[c];
        gt += got[c];
    }
    if (gt == 0) throw PreconditionError("chain coverage: could not sample the target domain");
    return static_cast<double>(mt) / static_cast<double>(gt);
}

VerifiedChain verified(DecompositionChain chain, const VerifyOptions& opt) {
    VerifiedChain v;
    v.report = verify_chain(chain, opt);
    v.chain = std::move(chain);
    return v;
}

}  // namespace wlab

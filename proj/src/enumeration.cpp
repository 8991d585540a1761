#include "wplab/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace wplab {

Letters Ball::word_of(std::size_t i) const {
  Letters out;
  while (i != 0) {
    const BallElement& e = elems[i];
    out.push_back(e.letter);
    i = static_cast<std::size_t>(e.parent);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

double free_ball_size(int rank, int depth) {
  // 1 + 2r * ((2r-1)^d - 1)/(2r-2)
  double k = 2.0 * rank - 1.0;
  return 1.0 + 2.0 * rank * (std::pow(k, depth) - 1.0) / (k - 1.0);
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Spatial hash over sign-canonical matrix entries for elementwise dedup in
// relator groups. Word-path roundoff keeps duplicate representations of one
// element within ~1e-12 of each other, so a duplicate lands in the same cell
// unless an entry sits within the probe margin of a cell boundary; only then
// are neighbor cells probed.
class MatrixDedup {
 public:
  explicit MatrixDedup(const std::vector<BallElement>& elems, double tol)
      : elems_(elems), tol_(tol), cell_(1e-5), margin_(1e-9) {}

  bool contains(const MoebiusMap& m) const {
    for (int s = 0; s < 2; ++s) {
      double e[4] = {m.a, m.b, m.c, m.d};
      if (s == 1) {
        for (double& v : e) v = -v;
      }
      std::int64_t base[4];
      int options[4];  // 1 = exact cell only, 2 = also the straddled neighbor
      std::int64_t alt[4];
      for (int i = 0; i < 4; ++i) {
        double q = e[i] / cell_;
        base[i] = llround(q);
        double frac = q - static_cast<double>(base[i]);
        options[i] = 1;
        if (std::abs(std::abs(frac) - 0.5) * cell_ < margin_) {
          options[i] = 2;
          alt[i] = base[i] + (frac > 0 ? 1 : -1);
        }
      }
      int total = options[0] * options[1] * options[2] * options[3];
      for (int mask = 0; mask < total; ++mask) {
        std::int64_t probe[4];
        int mm = mask;
        for (int i = 0; i < 4; ++i) {
          probe[i] = (mm % options[i]) == 0 ? base[i] : alt[i];
          mm /= options[i];
        }
        auto it = cells_.find(key(probe));
        if (it == cells_.end()) continue;
        for (std::uint32_t idx : it->second) {
          if (psl_distance(elems_[idx].m, m) <= tol_) return true;
        }
      }
    }
    return false;
  }

  // Registers elems_[index], which must already hold the matrix.
  void insert(std::uint32_t index) {
    const MoebiusMap& m = elems_[index].m;
    std::int64_t q[4] = {llround(m.a / cell_), llround(m.b / cell_), llround(m.c / cell_),
                         llround(m.d / cell_)};
    cells_[key(q)].push_back(index);
  }

 private:
  static std::uint64_t key(const std::int64_t* q) {
    std::uint64_t h = 0;
    for (int i = 0; i < 4; ++i) h = mix(h ^ static_cast<std::uint64_t>(q[i]));
    return h;
  }

  const std::vector<BallElement>& elems_;
  double tol_, cell_, margin_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

std::shared_ptr<const Ball> build_ball(const SurfaceGroup& g, int depth, const EnumConfig& cfg) {
  int rank = g.rank();
  double projected = free_ball_size(rank, depth);
  double bytes = projected * (sizeof(BallElement) + 16.0);
  if (bytes > static_cast<double>(cfg.memory_budget_bytes)) {
    std::ostringstream os;
    os << "enumerate_ball: projected ball of ~" << static_cast<std::uint64_t>(projected)
       << " elements (~" << static_cast<std::uint64_t>(bytes / (1 << 20))
       << " MiB, growth base " << (2 * rank - 1) << ") exceeds the budget of "
       << (cfg.memory_budget_bytes >> 20) << " MiB at depth " << depth;
    throw ResourceError(os.str());
  }

  bool free_group = g.relators.empty();
  auto ball = std::make_shared<Ball>();
  ball->depth = depth;
  ball->exact_free = free_group;
  ball->elems.push_back({MoebiusMap::identity(), -1, 0, 0});
  ball->shell_begin = {0, 1};

  MatrixDedup dedup(ball->elems, tolerances().matrix_eq);
  if (!free_group) dedup.insert(0);

  std::vector<MoebiusMap> gens;   // indexed by letter: [-rank..-1] then [1..rank]
  std::vector<MoebiusMap> inv;
  for (const auto& m : g.generators) {
    gens.push_back(m);
    inv.push_back(m.inverse());
  }
  auto letter_matrix = [&](std::int8_t l) -> const MoebiusMap& {
    return l > 0 ? gens[static_cast<std::size_t>(l - 1)]
                 : inv[static_cast<std::size_t>(-l - 1)];
  };

  std::size_t shell_from = 0;
  for (int d = 1; d <= depth; ++d) {
    std::size_t shell_to = ball->elems.size();
    for (std::size_t i = shell_from; i < shell_to; ++i) {
      std::int8_t last = ball->elems[i].letter;
      for (int sgn : {1, -1}) {
        for (int k = 1; k <= rank; ++k) {
          std::int8_t l = static_cast<std::int8_t>(sgn * k);
          if (last != 0 && l == -last) continue;  // free reduction
          MoebiusMap m = ball->elems[i].m * letter_matrix(l);
          if (!free_group) {
            if (dedup.contains(m)) continue;
          }
          ball->elems.push_back({m, static_cast<std::int32_t>(i), l,
                                 static_cast<std::uint8_t>(d)});
          if (!free_group) {
            dedup.insert(static_cast<std::uint32_t>(ball->elems.size() - 1));
          }
        }
      }
    }
    shell_from = shell_to;
    ball->shell_begin.push_back(ball->elems.size());
  }
  return ball;
}

}  // namespace

std::shared_ptr<const Ball> enumerate_ball(const SurfaceGroup& g, int depth,
                                           const EnumConfig& cfg) {
  if (depth < 0) throw std::domain_error("enumerate_ball: negative depth");
  if (depth > cfg.max_depth) {
    throw std::domain_error("enumerate_ball: depth " + std::to_string(depth) +
                            " exceeds the configured maximum " + std::to_string(cfg.max_depth));
  }
  if (!g.ball_cache) g.ball_cache = std::make_shared<BallCache>();
  std::lock_guard<std::mutex> lock(g.ball_cache->mu);
  if (g.ball_cache->ball && g.ball_cache->ball->depth >= depth) return g.ball_cache->ball;
  g.ball_cache->ball = build_ball(g, depth, cfg);
  return g.ball_cache->ball;
}

double compensated_sum(const std::vector<double>& terms) {
  double s = 0, comp = 0;
  for (double x : terms) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      comp += (s - t) + x;
    } else {
      comp += (x - t) + s;
    }
    s = t;
  }
  return s + comp;
}

namespace {

constexpr double kMergeTol = 1e-6;

// Geometric identity of a double coset: the <A>-orbit of the oriented line
// C(axis B), coordinatized by (translation position mod ell_A, endpoint
// shape, endpoint sign pattern). Used to merge word-distinct representatives
// in relator groups.
struct OrbitKey {
  double t_pos = 0;
  double log_w = 0;
  int sign_class = 0;
};

struct CosetData {
  Letters word;  // power-stripped representative
  double u = 0;
  LineKind kind = LineKind::Disjoint;
  double signed_cos = 0;
  int first_depth = 0;
  OrbitKey key;
  bool omitted = false;
};

class OrbitStore {
 public:
  explicit OrbitStore(double ell_a) : ell_(ell_a), grid_(1e-5) {}

  std::size_t find(const OrbitKey& k) const {
    for (double t : wrapped(k.t_pos)) {
      std::int64_t ct = cell(t), cw = cell(k.log_w);
      for (int dt = -1; dt <= 1; ++dt) {
        for (int dw = -1; dw <= 1; ++dw) {
          auto it = map_.find(hash(k.sign_class, ct + dt, cw + dw));
          if (it == map_.end()) continue;
          for (std::size_t idx : it->second) {
            const OrbitKey& o = keys_[idx];
            if (o.sign_class != k.sign_class) continue;
            if (std::abs(o.log_w - k.log_w) > kMergeTol) continue;
            double dtp = std::abs(o.t_pos - t);
            dtp = std::min(dtp, std::abs(ell_ - dtp));
            if (dtp <= kMergeTol) return idx;
          }
        }
      }
    }
    return SIZE_MAX;
  }

  void insert(const OrbitKey& k, std::size_t payload) {
    keys_.push_back(k);
    payloads_.push_back(payload);
    map_[hash(k.sign_class, cell(k.t_pos), cell(k.log_w))].push_back(keys_.size() - 1);
  }

  std::size_t payload(std::size_t idx) const { return payloads_[idx]; }

 private:
  std::vector<double> wrapped(double t) const {
    std::vector<double> out = {t};
    if (t < 2 * kMergeTol) out.push_back(t + ell_);
    if (t > ell_ - 2 * kMergeTol) out.push_back(t - ell_);
    return out;
  }
  std::int64_t cell(double v) const { return llround(v / grid_); }
  static std::uint64_t hash(int sc, std::int64_t a, std::int64_t b) {
    std::uint64_t h = mix(static_cast<std::uint64_t>(sc));
    h = mix(h ^ static_cast<std::uint64_t>(a));
    return mix(h ^ static_cast<std::uint64_t>(b));
  }

  double ell_, grid_;
  std::vector<OrbitKey> keys_;
  std::vector<std::size_t> payloads_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> map_;
};

Letters strip_powers(Letters w, const Letters& wa, const Letters& wb) {
  w = free_reduce(std::move(w));
  Letters ia = invert_letters(wa), ib = invert_letters(wb);
  auto starts_with = [](const Letters& w_, const Letters& p) {
    if (w_.size() < p.size() || p.empty()) return false;
    return std::equal(p.begin(), p.end(), w_.begin());
  };
  auto ends_with = [](const Letters& w_, const Letters& p) {
    if (w_.size() < p.size() || p.empty()) return false;
    return std::equal(p.rbegin(), p.rend(), w_.rbegin());
  };
  const Letters* heads[2] = {&wa, &ia};
  const Letters* tails[2] = {&wb, &ib};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Letters* p : heads) {
      while (starts_with(w, *p)) {
        w.erase(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p->size()));
        w = free_reduce(std::move(w));
        changed = true;
      }
    }
    for (const Letters* p : tails) {
      while (ends_with(w, *p)) {
        w.resize(w.size() - p->size());
        w = free_reduce(std::move(w));
        changed = true;
      }
    }
  }
  return w;
}

}  // namespace

DoubleCosets double_cosets(const SurfaceGroup& g, const std::string& alpha,
                           const std::string& beta, const EnumConfig& cfg) {
  Letters wa = free_reduce(parse_letters(g, resolve_word(g, alpha)));
  Letters wb = free_reduce(parse_letters(g, resolve_word(g, beta)));
  MoebiusMap ma = letters_matrix(g, wa);
  MoebiusMap mb = letters_matrix(g, wb);
  for (const auto& [m, name] : {std::pair{&ma, &alpha}, std::pair{&mb, &beta}}) {
    MapClass k = classify(*m);
    if (k != MapClass::Hyperbolic) {
      throw std::domain_error("double_cosets: curve \"" + *name + "\" is " + to_string(k) +
                              ", not hyperbolic");
    }
  }
  bool same_word = wa == wb;
  GeodesicLine axis_a = axis(ma);
  GeodesicLine axis_b = axis(mb);
  MoebiusMap norm = map_to_standard(axis_a);
  double ell_a = translation_length(ma);
  double tol = tolerances().degeneracy;

  auto ball = enumerate_ball(g, cfg.depth, cfg);
  std::size_t count = ball->size_at_depth(cfg.depth);
  bool free_group = g.relators.empty();

  // The geometry of a coset is always evaluated on its power-stripped
  // representative: long A-head/B-tail words evaluate the same line with
  // exponentially amplified rounding, stripped ones do not.
  std::vector<CosetData> cosets;
  std::unordered_map<std::string, std::uint32_t> by_word;
  by_word.reserve(count / 4 + 16);

  for (std::size_t i = 0; i < count; ++i) {
    Letters stripped = strip_powers(ball->word_of(i), wa, wb);
    if (same_word && stripped.empty()) continue;  // trivial coset <A> id <A>
    std::string key(stripped.begin(), stripped.end());
    auto [it, inserted] = by_word.try_emplace(key, static_cast<std::uint32_t>(cosets.size()));
    if (!inserted) continue;

    CosetData cd;
    cd.word = std::move(stripped);
    cd.first_depth = ball->elems[i].depth;
    MoebiusMap nc = norm * letters_matrix(g, cd.word);
    BoundaryPoint rp = apply(nc, axis_b.p);
    BoundaryPoint sp = apply(nc, axis_b.q);
    bool degenerate = rp.at_infinity || sp.at_infinity || rp.x == 0.0 || sp.x == 0.0;
    double u = 1.0;
    if (!degenerate) {
      u = std::abs(rp.x + sp.x) / std::abs(rp.x - sp.x);
    }
    if (degenerate || std::abs(u - 1.0) <= tol) {
      std::ostringstream os;
      os << "double_cosets(" << alpha << ", " << beta << "): representative \""
         << letters_to_string(g, cd.word)
         << "\" has u = 1 within tolerance (asymptotic lifts); degenerate or non-discrete "
            "configuration";
      throw AsymptoticCosetError(os.str());
    }
    cd.u = u;
    if (u > cfg.u_cutoff) {
      cd.omitted = true;
      cosets.push_back(std::move(cd));
      continue;
    }
    double r = rp.x, s = sp.x;
    cd.kind = u < 1.0 ? LineKind::Crossing : LineKind::Disjoint;
    // Crossing cosine signed so that d l_alpha / d tau_beta = -sum cos.
    if (cd.kind == LineKind::Crossing) cd.signed_cos = (r + s) / (r - s);
    cd.key.sign_class = (r > 0 ? 1 : 0) | (s > 0 ? 2 : 0);
    double lr = std::log(std::abs(r)), ls = std::log(std::abs(s));
    double t = 0.5 * (lr + ls);
    cd.key.log_w = 0.5 * (lr - ls);
    double frac = t / ell_a - std::floor(t / ell_a);
    cd.key.t_pos = frac * ell_a;
    cosets.push_back(std::move(cd));
  }

  // Power-stripping is a complete coset invariant only for free groups with
  // single-letter words; multi-letter words cancel partially (e.g. (ab)(Ba)
  // reduces to aa), and relator groups identify distinct words. Both cases
  // are merged by the A-orbit of the beta-axis line.
  bool word_keys_complete = free_group && wa.size() == 1 && wb.size() == 1;

  DoubleCosets out;
  std::size_t omitted = 0;
  if (word_keys_complete) {
    for (CosetData& cd : cosets) {
      if (cd.omitted) {
        ++omitted;
        continue;
      }
      out.reps.push_back({std::move(cd.word), cd.u, cd.kind, cd.signed_cos, cd.first_depth});
    }
  } else {
    OrbitStore store(ell_a);
    for (CosetData& cd : cosets) {
      if (cd.omitted) {
        ++omitted;  // cutoff cosets are counted without orbit bookkeeping
        continue;
      }
      if (store.find(cd.key) != SIZE_MAX) continue;
      store.insert(cd.key, out.reps.size());
      out.reps.push_back({std::move(cd.word), cd.u, cd.kind, cd.signed_cos, cd.first_depth});
    }
  }
  std::sort(out.reps.begin(), out.reps.end(),
            [](const DoubleCosetRep& x, const DoubleCosetRep& y) {
              if (x.u != y.u) return x.u < y.u;
              if (x.first_depth != y.first_depth) return x.first_depth < y.first_depth;
              return x.word < y.word;
            });

  out.report.depth = cfg.depth;
  out.report.coset_count = out.reps.size();
  out.report.omitted_beyond_cutoff = omitted;
  out.report.tail_estimate =
      static_cast<double>(omitted) * (2.0 / 3.0) / (cfg.u_cutoff * cfg.u_cutoff);
  return out;
}

ShellSeries shell_stabilization(const SurfaceGroup& g, const std::string& alpha,
                                const std::string& beta,
                                const std::function<double(const DoubleCosetRep&)>& summand,
                                const std::vector<int>& depths, const EnumConfig& cfg) {
  if (depths.empty()) throw std::domain_error("shell_stabilization: empty depth list");
  for (std::size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] <= depths[i - 1]) {
      throw std::domain_error("shell_stabilization: depths must be strictly increasing");
    }
  }
  EnumConfig deep = cfg;
  deep.depth = depths.back();
  DoubleCosets dc = double_cosets(g, alpha, beta, deep);

  ShellSeries out;
  double prev = 0;
  bool first = true;
  for (int d : depths) {
    std::vector<double> terms;
    std::size_t n = 0;
    for (const DoubleCosetRep& r : dc.reps) {
      if (r.first_depth <= d) {
        terms.push_back(summand(r));
        ++n;
      }
    }
    double partial = compensated_sum(terms);
    ShellPoint pt;
    pt.depth = d;
    pt.partial = partial;
    pt.increment = first ? 0 : partial - prev;
    pt.cosets = n;
    out.points.push_back(pt);
    prev = partial;
    first = false;
  }
  out.determined = depths.size() >= 2;
  out.stabilized =
      out.determined && std::abs(out.points.back().increment) < cfg.shell_tolerance;
  return out;
}

}  // namespace wplab

#include "lve/cleaning.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace lve {

namespace {

constexpr double kDefaultM = 2.7454646467;

int find_kind(const std::vector<Token>& toks, TokenKind k, int scale = -1) {
  for (size_t i = 0; i < toks.size(); ++i)
    if (toks[i].kind == k && (scale < 0 || toks[i].scale == scale))
      return static_cast<int>(i);
  return -1;
}

int count_kind(const std::vector<Token>& toks, TokenKind k) {
  int c = 0;
  for (const Token& t : toks) c += (t.kind == k);
  return c;
}

// positions strictly between p and q walking clockwise (increasing index)
std::vector<int> open_arc(int p, int q, int n) {
  std::vector<int> arc;
  for (int i = (p + 1) % n; i != q; i = (i + 1) % n) arc.push_back(i);
  return arc;
}

int ceil_limit(double a, int j) {
  return static_cast<int>(std::ceil(a * j - 1e-12));
}

}  // namespace

std::string term_class_name(TermClass c) {
  switch (c) {
    case TermClass::InnerTadpole: return "inner-tadpole";
    case TermClass::Crossing: return "crossing";
    case TermClass::Nesting: return "nesting";
    case TermClass::LowerScale: return "lower-scale";
    case TermClass::Remainder: return "remainder";
  }
  return "?";
}

std::vector<TermRecord> cleaning_step(const TermRecord& t, int j) {
  if (j < 0) throw std::invalid_argument("negative scale");
  int pos = find_kind(t.word.tokens, TokenKind::Resolvent, j);
  if (pos < 0) return {t};  // no active resolvent: documented no-op

  Token lowered = j == 0 ? Token{TokenKind::Identity, -1, -1}
                         : Token{TokenKind::Resolvent, j - 1, -1};

  TermRecord low = t;
  low.word.tokens[pos] = lowered;

  TermRecord high = t;
  high.sign = -t.sign;
  std::vector<Token> repl{lowered,
                          {TokenKind::Sigma, -1, -1},
                          {TokenKind::PropD, j, -1},
                          {TokenKind::Resolvent, j, -1}};
  high.word.tokens.erase(high.word.tokens.begin() + pos);
  high.word.tokens.insert(high.word.tokens.begin() + pos, repl.begin(),
                          repl.end());
  return {low, high};
}

std::vector<TermRecord> integrate_by_parts(const TermRecord& t) {
  const std::vector<Token>& toks = t.word.tokens;
  if (count_kind(toks, TokenKind::Sigma) != 1)
    throw std::invalid_argument("word must carry exactly one explicit sigma");
  int p = find_kind(toks, TokenKind::Sigma);
  int n = static_cast<int>(toks.size());

  // existing sigma chords: pin id -> the two SiteProj positions
  std::map<int, std::vector<int>> chords;
  for (int i = 0; i < n; ++i)
    if (toks[i].kind == TokenKind::SiteProj) chords[toks[i].pin].push_back(i);

  std::vector<TermRecord> out;
  for (int q = 0; q < n; ++q) {
    if (toks[q].kind != TokenKind::Resolvent) continue;
    int jr = toks[q].scale;

    TermClass cls;
    if (jr < t.scale) {
      cls = TermClass::LowerScale;
    } else {
      bool adjacent = true;
      for (int i : open_arc(p, q, n)) {
        TokenKind k = toks[i].kind;
        if (k != TokenKind::PropD && k != TokenKind::PropDCum &&
            k != TokenKind::Identity)
          adjacent = false;
      }
      if (adjacent) {
        cls = TermClass::InnerTadpole;
      } else {
        bool crossing = false;
        std::vector<int> arc = open_arc(p, q, n);
        for (const auto& [id, pos] : chords) {
          if (pos.size() != 2) continue;
          bool in0 = std::count(arc.begin(), arc.end(), pos[0]) > 0;
          bool in1 = std::count(arc.begin(), arc.end(), pos[1]) > 0;
          if (in0 != in1) crossing = true;
        }
        cls = crossing ? TermClass::Crossing : TermClass::Nesting;
      }
    }

    // dR^j/dsigma_z = -R^j (2i sqrt(lambda) E_z C_{<=j}) R^j, with the
    // cumulative propagator resolved into slices so every D-line carries
    // a definite scale (the per-scale counterterm pairs with it)
    for (int k = 0; k <= jr; ++k) {
      TermRecord child = t;
      child.sign = -t.sign;
      int pin = child.word.n_pins++;
      child.word.tokens[p] = {TokenKind::SiteProj, -1, pin};
      std::vector<Token> repl{{TokenKind::Resolvent, jr, -1},
                              {TokenKind::SiteProj, -1, pin},
                              {TokenKind::PropD, k, -1},
                              {TokenKind::Resolvent, jr, -1}};
      child.word.tokens.erase(child.word.tokens.begin() + q);
      child.word.tokens.insert(child.word.tokens.begin() + q, repl.begin(),
                               repl.end());
      child.classification = cls;
      out.push_back(std::move(child));
    }
  }
  return out;
}

std::vector<TermRecord> split_adjacent(const TermRecord& t) {
  if (t.classification != TermClass::InnerTadpole)
    throw std::invalid_argument("expected an adjacent-contraction record");
  const std::vector<Token>& toks = t.word.tokens;
  int n = static_cast<int>(toks.size());
  // canonical form: SiteProj{pin} PropD{k} Resolvent{jr} SiteProj{pin}
  int r_pos = -1, k = -1, jr = -1;
  for (int i = 0; i < n; ++i) {
    if (toks[i].kind != TokenKind::Resolvent) continue;
    const Token& d = toks[(i - 1 + n) % n];
    const Token& left = toks[(i - 2 + n) % n];
    const Token& right = toks[(i + 1) % n];
    if (d.kind == TokenKind::PropD && left.kind == TokenKind::SiteProj &&
        right.kind == TokenKind::SiteProj && left.pin == right.pin) {
      r_pos = i;
      k = d.scale;
      jr = toks[i].scale;
      break;
    }
  }
  if (r_pos < 0) throw std::invalid_argument("no adjacent pattern found");

  // delta part of R = 1 - sigma D R: E_z C_k E_z = T_k E_z exposes an
  // explicit tadpole scalar
  TermRecord tad = t;
  tad.word.tokens[r_pos] = {TokenKind::Identity, -1, -1};
  tad.word.tokens[(r_pos - 1 + n) % n] = {TokenKind::Tadpole, k, -1};
  tad.classification = TermClass::InnerTadpole;

  std::vector<TermRecord> out{std::move(tad)};
  // continuation terms, the cumulative propagator again sliced by scale
  for (int kk = 0; kk <= jr; ++kk) {
    TermRecord cont = t;
    cont.sign = -t.sign;
    std::vector<Token> repl{{TokenKind::Sigma, -1, -1},
                            {TokenKind::PropD, kk, -1},
                            {TokenKind::Resolvent, jr, -1}};
    cont.word.tokens.erase(cont.word.tokens.begin() + r_pos);
    cont.word.tokens.insert(cont.word.tokens.begin() + r_pos, repl.begin(),
                            repl.end());
    cont.classification = TermClass::Nesting;  // refined at its own IBP
    out.push_back(std::move(cont));
  }
  return out;
}

Word initial_word(const DualCycleWord& cycle, int j_max) {
  validate_cycle_word(cycle);
  Word w;
  std::map<int, int> pin_of_position;
  for (size_t i = 0; i < cycle.objects.size(); ++i) {
    switch (cycle.objects[i]) {
      case CycleObject::Resolvent:
      case CycleObject::LeafResolvent:
        w.tokens.push_back({TokenKind::Resolvent, j_max, -1});
        break;
      case CycleObject::CounterDot:
        w.tokens.push_back({TokenKind::CounterDot, j_max, -1});
        break;
      case CycleObject::HalfLine: {
        int partner = cycle.pairing.at(static_cast<int>(i));
        int pin;
        auto it = pin_of_position.find(partner);
        if (it != pin_of_position.end()) {
          pin = it->second;
        } else {
          pin = w.n_pins++;
          pin_of_position[static_cast<int>(i)] = pin;
        }
        w.tokens.push_back({TokenKind::PropC, j_max, -1});
        w.tokens.push_back({TokenKind::SiteProj, -1, pin});
        break;
      }
    }
  }
  if (w.tokens.empty()) w.tokens.push_back({TokenKind::Identity, -1, -1});
  return w;
}

TermLedger run_cleaning(const DualCycleWord& start, double a, int j_max,
                        int cap, bool count_nesting) {
  if (a <= 0) throw std::invalid_argument("stopping slope must be positive");
  if (j_max < 0) throw std::invalid_argument("negative j_max");
  TermLedger ledger;
  TermRecord init;
  init.word = initial_word(start, j_max);
  init.scale = j_max;
  std::deque<TermRecord> queue{init};

  auto finish = [&](TermRecord r, TermClass cls, int stop) {
    r.classification = cls;
    if (cls == TermClass::Remainder) r.stop_scale = stop;
    ledger.records.push_back(std::move(r));
  };

  while (!queue.empty()) {
    if (static_cast<int>(ledger.records.size() + queue.size()) > cap) {
      ledger.truncated = true;
      while (!queue.empty()) {
        TermRecord r = std::move(queue.front());
        queue.pop_front();
        r.truncated = true;
        finish(std::move(r), TermClass::Remainder, r.scale);
      }
      break;
    }
    TermRecord r = std::move(queue.front());
    queue.pop_front();
    int j = r.scale;

    if (count_kind(r.word.tokens, TokenKind::Sigma) == 1) {
      std::vector<TermRecord> children = integrate_by_parts(r);
      for (TermRecord& c : children) {
        switch (c.classification) {
          case TermClass::LowerScale:
            ledger.records.push_back(std::move(c));
            break;
          case TermClass::InnerTadpole: {
            if (c.tadpoles[j] >= ceil_limit(a, j)) {
              // tadpole chain limiter: desk-scale termination device
              finish(std::move(c), TermClass::Remainder, j);
              break;
            }
            for (TermRecord& sub : split_adjacent(c)) {
              sub.tadpoles[j] += 1;
              if (sub.classification == TermClass::InnerTadpole)
                ledger.records.push_back(std::move(sub));
              else
                queue.push_back(std::move(sub));
            }
            break;
          }
          case TermClass::Crossing:
          case TermClass::Nesting: {
            if (c.classification == TermClass::Crossing || count_nesting)
              c.j_lines[j] += 1;
            c.bound_factor *= std::pow(kDefaultM, -2.0 * j);
            queue.push_back(std::move(c));
            break;
          }
          case TermClass::Remainder:
            ledger.records.push_back(std::move(c));
            break;
        }
      }
      continue;
    }

    if (j <= 0) {
      finish(std::move(r), TermClass::Remainder, j_max == 0 ? 0 : -1);
      continue;
    }
    if (r.j_lines[j] >= ceil_limit(a, j)) {
      finish(std::move(r), TermClass::Remainder, j);
      continue;
    }
    if (find_kind(r.word.tokens, TokenKind::Resolvent, j) >= 0) {
      for (TermRecord& c : cleaning_step(r, j)) queue.push_back(std::move(c));
      continue;
    }
    r.scale -= 1;
    queue.push_back(std::move(r));
  }

  ledger.stop_scale = -1;
  for (const TermRecord& r : ledger.records) {
    if (r.classification == TermClass::Remainder)
      ledger.stop_scale = std::max(ledger.stop_scale, r.stop_scale);
    for (const auto& [jj, c] : r.j_lines) {
      auto& slot = ledger.counters[jj];
      slot = std::max(slot, c);
    }
  }
  return ledger;
}

TermLedger pair_tadpoles(const TermLedger& ledger) {
  TermLedger out = ledger;
  int j0 = ledger.stop_scale;
  size_t n = out.records.size();
  for (size_t i = 0; i < n; ++i) {
    TermRecord& r = out.records[i];
    if (r.classification != TermClass::InnerTadpole) continue;
    int pos = find_kind(r.word.tokens, TokenKind::Tadpole);
    if (pos < 0) continue;
    int jt = r.word.tokens[pos].scale;
    if (jt <= j0) continue;  // low-scale tadpoles stay, flagged by pos
    TermRecord twin = r;
    twin.word.tokens[pos].kind = TokenKind::CounterDot;
    twin.paired_with = static_cast<int>(i);
    r.paired_with = static_cast<int>(out.records.size());
    out.records.push_back(std::move(twin));
  }
  for (size_t i = 0; i < out.records.size(); ++i) {
    const TermRecord& r = out.records[i];
    if (r.classification == TermClass::InnerTadpole &&
        find_kind(r.word.tokens, TokenKind::Tadpole) >= 0 &&
        r.word.tokens[find_kind(r.word.tokens, TokenKind::Tadpole)].scale >
            j0 &&
        r.paired_with < 0)
      throw std::runtime_error("unmatched high-scale tadpole");
  }
  return out;
}

int net_tadpole_count(const TermLedger& ledger, int j) {
  int net = 0;
  for (const TermRecord& r : ledger.records)
    for (const Token& t : r.word.tokens) {
      if (t.scale != j) continue;
      if (t.kind == TokenKind::Tadpole) net += r.sign;
      if (t.kind == TokenKind::CounterDot) net -= r.sign;
    }
  return net;
}

BoundReport bound_product(const TermLedger& ledger, double lambda, double M) {
  (void)lambda;
  if (ledger.stop_scale < 0) return {1.0, true};
  BoundReport rep;
  for (const TermRecord& r : ledger.records) {
    if (r.classification != TermClass::Remainder) continue;
    for (const auto& [j, nj] : r.j_lines) {
      double fact = 1.0;
      for (int q = 2; q <= nj; ++q) fact *= q;
      rep.value *= std::pow(M, -2.0 * j * nj) * fact;
    }
  }
  rep.within_nelson =
      rep.value <= std::exp(-1.0 * ledger.stop_scale * ledger.stop_scale);
  return rep;
}

namespace {

struct EvalCache {
  const LatticeModel* model;
  double lambda;
  std::vector<Eigen::MatrixXcd> cumulative;  // C_{<=j}
  std::vector<Eigen::MatrixXcd> slice;       // C_j
  std::vector<double> tadpole;               // T_j

  // per sigma point
  std::vector<Eigen::MatrixXcd> resolvent;   // R^j(sigma)
  Eigen::MatrixXcd sigma_diag;

  void set_sigma(const Eigen::VectorXd& sigma) {
    int S = model->sites();
    std::complex<double> c2i = 2.0 * std::complex<double>(0, 1) *
                               std::sqrt(lambda);
    sigma_diag = sigma.cast<std::complex<double>>().asDiagonal();
    for (size_t j = 0; j < cumulative.size(); ++j) {
      Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(S, S) +
                           c2i * sigma_diag * cumulative[j];
      resolvent[j] = A.inverse();
    }
  }

  Eigen::MatrixXcd token_matrix(const Token& t,
                                const std::vector<int>& pin_sites) const {
    int S = model->sites();
    std::complex<double> c2i =
        2.0 * std::complex<double>(0, 1) * std::sqrt(lambda);
    switch (t.kind) {
      case TokenKind::Resolvent:
        return resolvent.at(t.scale);
      case TokenKind::PropC:
        return slice.at(t.scale);
      case TokenKind::PropD:
        return c2i * slice.at(t.scale);
      case TokenKind::PropDCum:
        return c2i * cumulative.at(t.scale);
      case TokenKind::Sigma:
        return sigma_diag;
      case TokenKind::SiteProj: {
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(S, S);
        int z = pin_sites.at(t.pin);
        e(z, z) = 1.0;
        return e;
      }
      case TokenKind::Tadpole:
        return c2i * tadpole.at(t.scale) *
               Eigen::MatrixXcd::Identity(S, S);
      case TokenKind::CounterDot:
        return -c2i * tadpole.at(t.scale) *
               Eigen::MatrixXcd::Identity(S, S);
      case TokenKind::Identity:
        return Eigen::MatrixXcd::Identity(S, S);
    }
    throw std::logic_error("unknown token");
  }
};

EvalCache make_cache(const LatticeModel& model, double lambda) {
  if (model.slices.empty())
    throw std::invalid_argument("word evaluation needs a sliced model");
  EvalCache c;
  c.model = &model;
  c.lambda = lambda;
  for (int j = 0; j <= model.j_max; ++j) {
    c.slice.push_back(model.slice(j).cast<std::complex<double>>());
    c.cumulative.push_back(
        model.cumulative_slice(j).cast<std::complex<double>>());
    c.tadpole.push_back(model.slice(j)(0, 0));
  }
  c.resolvent.resize(c.cumulative.size());
  return c;
}

std::vector<std::pair<double, double>> hermite_rule(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = std::sqrt(static_cast<double>(i));
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<std::pair<double, double>> rule;
  for (int i = 0; i < n; ++i) {
    double v = es.eigenvectors()(0, i);
    rule.emplace_back(es.eigenvalues()[i], v * v);
  }
  return rule;
}

// Tr(E_{z_0} S_0 E_{z_1} S_1 ... S_{m-1}) = prod_i S_i(z_i, z_{i+1}),
// so the pin-site sum reduces to scalar lookups on the segment products
// between consecutive projectors.
std::complex<double> eval_word_at_sigma(const EvalCache& cache,
                                        const Word& w) {
  int S = cache.model->sites();
  const std::vector<int> no_pins;
  std::vector<int> proj_pos;
  for (size_t i = 0; i < w.tokens.size(); ++i)
    if (w.tokens[i].kind == TokenKind::SiteProj)
      proj_pos.push_back(static_cast<int>(i));
  int m = static_cast<int>(proj_pos.size());
  int n = static_cast<int>(w.tokens.size());

  if (m == 0) {
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(S, S);
    for (const Token& t : w.tokens)
      prod = prod * cache.token_matrix(t, no_pins);
    return prod.trace();
  }

  std::vector<Eigen::MatrixXcd> seg(m);
  std::vector<int> pins(m);
  for (int i = 0; i < m; ++i) {
    pins[i] = w.tokens[proj_pos[i]].pin;
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(S, S);
    int stop = proj_pos[(i + 1) % m];
    for (int p = (proj_pos[i] + 1) % n; p != stop; p = (p + 1) % n)
      prod = prod * cache.token_matrix(w.tokens[p], no_pins);
    seg[i] = prod;
  }

  std::vector<int> distinct = pins;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  int d = static_cast<int>(distinct.size());
  if (d > 10) throw std::length_error("too many sigma pins");
  std::map<int, int> slot;
  for (int i = 0; i < d; ++i) slot[distinct[i]] = i;

  std::vector<int> z(d, 0);
  std::complex<double> total = 0.0;
  while (true) {
    std::complex<double> prod = 1.0;
    for (int i = 0; i < m; ++i)
      prod *= seg[i](z[slot[pins[i]]], z[slot[pins[(i + 1) % m]]]);
    total += prod;
    int pos = d - 1;
    while (pos >= 0 && ++z[pos] == S) z[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

}  // namespace

std::complex<double> word_value(const Word& w, const LatticeModel& model,
                                double lambda, int gh_degree) {
  if (model.sites() > 3) throw std::length_error("at most 3 sites");
  EvalCache cache = make_cache(model, lambda);
  auto rule = hermite_rule(gh_degree);
  int S = model.sites();
  std::vector<int> idx(S, 0);
  Eigen::VectorXd sigma(S);
  std::complex<double> total = 0.0;
  while (true) {
    double wt = 1.0;
    for (int i = 0; i < S; ++i) {
      sigma[i] = rule[idx[i]].first;
      wt *= rule[idx[i]].second;
    }
    cache.set_sigma(sigma);
    total += wt * eval_word_at_sigma(cache, w);
    int pos = S - 1;
    while (pos >= 0 && ++idx[pos] == gh_degree) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

std::complex<double> ledger_value(const TermLedger& ledger,
                                  const LatticeModel& model, double lambda,
                                  int gh_degree) {
  if (model.sites() > 3) throw std::length_error("at most 3 sites");
  EvalCache cache = make_cache(model, lambda);
  auto rule = hermite_rule(gh_degree);
  int S = model.sites();
  std::vector<int> idx(S, 0);
  Eigen::VectorXd sigma(S);
  std::complex<double> total = 0.0;
  while (true) {
    double wt = 1.0;
    for (int i = 0; i < S; ++i) {
      sigma[i] = rule[idx[i]].first;
      wt *= rule[idx[i]].second;
    }
    cache.set_sigma(sigma);
    for (const TermRecord& r : ledger.records)
      total += wt * static_cast<double>(r.sign) *
               eval_word_at_sigma(cache, r.word);
    int pos = S - 1;
    while (pos >= 0 && ++idx[pos] == gh_degree) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

std::string record_to_json(const TermRecord& r) {
  nlohmann::json j;
  nlohmann::json toks = nlohmann::json::array();
  static const char* names[] = {"R",   "C",    "D",       "Dcum", "sigma",
                                "proj", "tadpole", "counterdot", "1"};
  for (const Token& t : r.word.tokens) {
    nlohmann::json tj;
    tj["k"] = names[static_cast<int>(t.kind)];
    if (t.scale >= 0) tj["j"] = t.scale;
    if (t.pin >= 0) tj["pin"] = t.pin;
    toks.push_back(tj);
  }
  j["word"] = toks;
  j["scale"] = r.scale;
  j["class"] = term_class_name(r.classification);
  j["sign"] = r.sign;
  j["bound_factor"] = r.bound_factor;
  j["j_lines"] = r.j_lines;
  if (r.stop_scale != -2) j["stop_scale"] = r.stop_scale;
  if (r.truncated) j["truncated"] = true;
  if (r.paired_with >= 0) j["paired_with"] = r.paired_with;
  return j.dump();
}

}  // namespace lve

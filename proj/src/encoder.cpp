#include "wclat/encoder.hpp"

#include <algorithm>
#include <numeric>

namespace wclat {

namespace {

std::string nm(const std::string& fam, const std::string& id, std::int64_t i) {
  return fam + "_" + id + "_" + std::to_string(i);
}

Clause implies(std::vector<Atom> pre, std::vector<Atom> post) {
  return Clause{std::move(pre), std::move(post)};
}

}  // namespace

struct Encoder::Impl {
  Impl(const NetworkModel& n, std::string sig, EncodeOptions o)
      : net(n), opt(o), td(n.time), bounds(occurrence_bounds(n)) {
    enc.signal = std::move(sig);
    enc.time = td;
    if (!net.find_signal(enc.signal))
      throw ConfigError("unknown objective signal '" + enc.signal + "'");
    auto diags = validate(net);
    if (!diags.empty())
      throw ConfigError("model is invalid: " + diags.front().element + ": " + diags.front().rule +
                        " (" + diags.front().message + ")");
    tsup = td.sup;
    pdu.resize(net.pdus.size());
    frame.resize(net.frames.size());
  }

  struct PduVars {
    std::int64_t count = 0;
    // index 0 holds the constant predecessor where one exists
    std::vector<VarId> alpha, sigma;
    std::vector<VarId> nF;                       // frame-level: frame instance
    std::vector<VarId> n, fn, o, join, start;    // containees
    std::vector<VarId> len;                      // containers: per instance
  };
  struct FrameVars {
    std::int64_t count = 0;
    std::vector<VarId> copy, len, sigma, eps, busy, epsT, round;
  };

  const NetworkModel& net;
  EncodeOptions opt;
  TimeDomain td;
  OccurrenceBounds bounds;
  Tick tsup = 0;
  Encoding enc;
  std::vector<PduVars> pdu;
  std::vector<FrameVars> frame;
  std::map<std::string, std::vector<VarId>> nS;   // signal -> mapping vars
  std::map<std::string, VarId> task_zero;
  std::vector<VarId> order;
  std::vector<VarId> sched;

  ConstraintProblem& P() { return enc.problem; }

  VarId time_var(const std::string& name) { return P().add_var(name, td.min, tsup); }

  void add(const std::string& schema, Clause c) { P().add(schema, std::move(c)); }
  void add_redundant(const std::string& schema, Clause c) {
    if (opt.redundant) P().add(schema, std::move(c));
  }

  // idx = k iff seq[k-1] < x + shift <= seq[k] for k = 1..n; idx = n+1 when
  // x + shift exceeds seq[n]. seq[0] is the constant predecessor.
  void index_mapping(const std::string& schema, VarId x, Value shift, const std::vector<VarId>& seq,
                     VarId idx, bool paper_form) {
    auto n = static_cast<Value>(seq.size()) - 1;
    // x + shift > seq[k]  <=>  x - seq[k] >= 1 - shift
    auto after = [&](Value k) { return diff(x, Rel::Ge, seq[static_cast<std::size_t>(k)], 1 - shift); };
    auto upto = [&](Value k) { return diff(x, Rel::Le, seq[static_cast<std::size_t>(k)], -shift); };
    if (paper_form) {
      for (Value k = 1; k <= n; ++k) add(schema, implies({after(k - 1), upto(k)}, {eq(idx, k)}));
      add(schema + "-overflow", implies({after(n)}, {eq(idx, n + 1)}));
    }
    if (!paper_form || opt.redundant) {
      for (Value k = 1; k <= n; ++k) {
        P().add(schema + "-bounds", implies({after(k)}, {ge(idx, k + 1)}));
        P().add(schema + "-bounds", implies({upto(k)}, {le(idx, k)}));
      }
    }
  }

  VarId task_const_zero(std::size_t t) {
    const auto& id = net.tasks[t].id;
    auto it = task_zero.find(id);
    if (it != task_zero.end()) return it->second;
    VarId v = P().add_const(nm("alpha_T", id, bounds.tasks.at(id).first - 1), td.min - 1);
    task_zero[id] = v;
    return v;
  }

  std::vector<VarId> task_seq(std::size_t t) {
    std::vector<VarId> seq{task_const_zero(t)};
    const auto& v = enc.activation.at(net.tasks[t].id);
    seq.insert(seq.end(), v.begin(), v.end());
    return seq;
  }

  void source_windows(const std::string& fam, const std::string& schema, const std::string& id,
                      const TimingModel& m, const OccurrenceRange& occ, std::vector<VarId>& out) {
    for (std::int64_t j = occ.first; j <= occ.last; ++j) {
      OccurrenceWindow w = clamped_window(m, j, td);
      VarId v = P().add_var(nm(fam, id, j), td.min, td.max);
      P().add({implies({}, {ge(v, w.earliest)}), schema});
      P().add({implies({}, {le(v, w.latest)}), schema, true});
      if (!out.empty()) add("occurrence-order", implies({}, {leq(out.back(), v)}));
      out.push_back(v);
      order.push_back(v);
    }
  }

  // Latch variables are needed by the signal mapping before the PDU layer.
  void declare_pdu_instances() {
    for (std::size_t p = 0; p < net.pdus.size(); ++p) {
      const Pdu& pd = net.pdus[p];
      auto& pv = pdu[p];
      pv.count = bounds.pdus.at(pd.id).last;
      pv.alpha.push_back(P().add_const(nm("alpha_P", pd.id, 0), td.min - 1));
      pv.sigma.push_back(P().add_const(nm("sigma_P", pd.id, 0), td.min - 1));
      for (std::int64_t k = 1; k <= pv.count; ++k) {
        pv.alpha.push_back(time_var(nm("alpha_P", pd.id, k)));
        pv.sigma.push_back(time_var(nm("sigma_P", pd.id, k)));
      }
    }
  }

  void signal_layer() {
    for (const auto& t : net.tasks) {
      auto& v = enc.activation[t.id];
      source_windows("alpha_T", "task-window", t.id, t.activation, bounds.tasks.at(t.id), v);
    }
    for (const auto& s : net.signals) {
      auto& v = enc.phi[s.id];
      source_windows("phi_S", "signal-window", s.id, s.update_model, bounds.signals.at(s.id), v);
    }
    declare_pdu_instances();
    for (const auto& s : net.signals) {
      const auto& occ = bounds.signals.at(s.id);
      auto p = net.pdu_index(s.pdu);
      auto& ns = nS[s.id];
      for (std::int64_t j = occ.first; j <= occ.last; ++j) {
        VarId phi = enc.phi[s.id][static_cast<std::size_t>(j - occ.first)];
        VarId n = P().add_var(nm("n_S", s.id, j), 1, pdu[p].count + 1);
        ns.push_back(n);
        index_mapping("signal-mapping", phi, 0, pdu[p].sigma, n, true);
      }
    }
  }

  void pdu_order(std::size_t p) {
    auto& pv = pdu[p];
    for (std::int64_t k = 1; k <= pv.count; ++k) {
      auto kk = static_cast<std::size_t>(k);
      VarId a = pv.alpha[kk], s = pv.sigma[kk];
      add("pdu-order", implies({le(a, td.max)}, {diff(a, Rel::Ge, pv.sigma[kk - 1], 1)}));
      add("pdu-latch", implies({}, {diff(s, Rel::Ge, a, 0)}));
      add("pdu-latch", implies({ge(a, tsup)}, {ge(s, tsup)}));
      if (k > 1) add_redundant("pdu-order", implies({le(s, td.max)}, {diff(s, Rel::Ge, pv.sigma[kk - 1], 1)}));
    }
  }

  void plain_pdu(std::size_t p) {
    const Pdu& pd = net.pdus[p];
    auto& pv = pdu[p];
    struct Occ {
      VarId phi, n;
    };
    std::vector<Occ> trig;
    for (const auto& s : net.signals) {
      if (s.pdu != pd.id || !s.triggers_pdu) continue;
      for (std::size_t j = 0; j < enc.phi[s.id].size(); ++j) trig.push_back({enc.phi[s.id][j], nS[s.id][j]});
    }
    for (std::int64_t k = 1; k <= pv.count; ++k) {
      auto kk = static_cast<std::size_t>(k);
      VarId e = time_var(nm("alphaE_P", pd.id, k));
      Extremum ex{e, true, cst(tsup), {}};
      for (const auto& o : trig) ex.terms.push_back({{eq(o.n, k)}, var(o.phi)});
      P().add("pdu-event-trigger", ex);

      Extremum a{pv.alpha[kk], true, cst(tsup), {{{}, var(e)}}};
      Term timer = cst(tsup);
      if (pd.timeout_period) {
        Tick T = *pd.timeout_period;
        Value qmax = (tsup - td.min) / T + 1;
        VarId q = P().add_var(nm("tq_P", pd.id, k), -1, qmax);
        VarId g = P().add_var(nm("tg_P", pd.id, k), td.min, td.min + T * (qmax + 1));
        VarId at = time_var(nm("alphaT_P", pd.id, k));
        VarId prev = pv.sigma[kk - 1];
        // q = floor((sigma_{k-1} - T_min) / T), g = T_min + (q + 1) T
        P().add("pdu-timer", Linear{{{T, q}, {-1, prev}}, Rel::Le, -td.min});
        P().add("pdu-timer", Linear{{{1, prev}, {-T, q}}, Rel::Le, td.min + T - 1});
        P().add("pdu-timer", Linear{{{1, g}, {-T, q}}, Rel::Eq, td.min + T});
        P().add("pdu-timer", Extremum{at, true, cst(tsup), {{{le(g, td.max)}, var(g)}}});
        a.terms.push_back({{}, var(at)});
        timer = var(at);
      }
      P().add("pdu-trigger", a);
      if (opt.redundant) {
        Extremum c{pv.alpha[kk], true, timer, {}};
        for (const auto& o : trig)
          c.terms.push_back({{diff(o.phi, Rel::Ge, pv.sigma[kk - 1], 1)}, var(o.phi)});
        P().add("pdu-trigger-causal", c);
      }
    }
    pdu_order(p);
  }

  // Fill that containee instances contribute to container instance c, as
  // seen at the arrival of (i, k). `strict_after` excludes later arrivals at
  // the same tick (declaration order decides).
  struct Inst {
    std::size_t pos;  // position among the container's containees
    std::size_t p;
    std::int64_t k;
  };

  VarId slot_flag(const std::string& name, const Inst& other, const Inst& me, Value c, Value tie,
                  std::size_t container) {
    (void)container;
    const auto& ov = pdu[other.p];
    auto ok = static_cast<std::size_t>(other.k);
    VarId b = P().add_var(name, 0, 1);
    std::vector<Atom> atoms{eq(ov.n[ok], c),
                            diff(ov.alpha[ok], Rel::Le, pdu[me.p].alpha[static_cast<std::size_t>(me.k)], tie)};
    if (ov.join[ok] != kNoVar) atoms.push_back(eq(ov.join[ok], 0));
    P().add("pdu-fill", Reify{b, atoms});
    return b;
  }

  void container(std::size_t cidx) {
    const Pdu& cd = net.pdus[cidx];
    auto& cv = pdu[cidx];
    const Value Om = cv.count;
    std::vector<Inst> insts;
    std::int64_t total = cd.header_bits;
    for (std::size_t pos = 0; pos < cd.containees.size(); ++pos) {
      std::size_t i = net.pdu_index(cd.containees[pos]);
      total += net.pdus[i].length_bits;
      for (std::int64_t k = 1; k <= pdu[i].count; ++k) insts.push_back({pos, i, k});
    }
    const bool dynamic = cd.layout == Layout::Dynamic;
    const bool tight = dynamic && total > cd.length_bits;
    const bool threshold = cd.threshold_bits && total > *cd.threshold_bits;

    // placement variables per containee instance
    for (std::size_t pos = 0; pos < cd.containees.size(); ++pos) {
      std::size_t i = net.pdu_index(cd.containees[pos]);
      const Pdu& pd = net.pdus[i];
      auto& iv = pdu[i];
      const bool queued = pd.collection == Collection::Queued;
      iv.n.assign(static_cast<std::size_t>(iv.count + 1), kNoVar);
      iv.fn = iv.o = iv.join = iv.start = iv.n;
      for (std::int64_t k = 1; k <= iv.count; ++k) {
        auto kk = static_cast<std::size_t>(k);
        iv.fn[kk] = P().add_var(nm("fn_P", pd.id, k), 1, Om + 1);
        iv.n[kk] = P().add_var(nm("n_P", pd.id, k), 1, Om + 1);
        iv.o[kk] = P().add_var(nm("o_P", pd.id, k), 0, k == iv.count || queued ? 0 : 1);
        if (!queued && k > 1) iv.join[kk] = P().add_var(nm("join_P", pd.id, k), 0, 1);
        iv.start[kk] = queued && k > 1 ? P().add_var(nm("start_P", pd.id, k), 1, Om + 2) : iv.fn[kk];
      }
    }

    for (std::size_t pos = 0; pos < cd.containees.size(); ++pos) {
      std::size_t i = net.pdu_index(cd.containees[pos]);
      const Pdu& pd = net.pdus[i];
      auto& iv = pdu[i];
      const bool queued = pd.collection == Collection::Queued;
      for (std::int64_t k = 1; k <= iv.count; ++k) {
        auto kk = static_cast<std::size_t>(k);
        VarId a = iv.alpha[kk], n = iv.n[kk], fn = iv.fn[kk], o = iv.o[kk];
        index_mapping("pdu-first-candidate", a, 0, cv.alpha, fn, true);
        add("pdu-containment", implies({le(a, td.max)}, {le(n, Om)}));
        add("pdu-containment", implies({ge(a, tsup)}, {eq(n, Om + 1)}));
        add("pdu-overwrite", implies({ge(a, tsup)}, {eq(o, 0)}));
        if (k > 1) {
          VarId np = iv.n[kk - 1];
          add("pdu-collection",
              implies({le(a, td.max)}, {diff(n, Rel::Ge, np, queued ? 1 : 0)}));
          if (queued) {
            P().add("pdu-collection", Extremum{iv.start[kk], false, var(fn), {{{}, var(np, 1)}}});
          } else {
            VarId j = iv.join[kk];
            P().add("pdu-overwrite",
                    Reify{j, {diff(np, Rel::Ge, fn, 0), le(np, Om), le(a, td.max)}});
            P().add("pdu-overwrite", Linear{{{1, iv.o[kk - 1]}, {-1, j}}, Rel::Eq, 0});
            add("pdu-overwrite", implies({eq(j, 1)}, {diff(n, Rel::Eq, np, 0)}));
          }
        }
        std::vector<Atom> placed{le(a, td.max)};
        if (iv.join[kk] != kNoVar) placed.push_back(eq(iv.join[kk], 0));
        if (!tight) {
          add("pdu-placement", implies(placed, {diff(n, Rel::Eq, iv.start[kk], 0)}));
        } else {
          add("pdu-placement", implies(placed, {diff(n, Rel::Ge, iv.start[kk], 0)}));
        }
      }
    }

    // containment indicators and container length
    std::map<std::pair<std::size_t, std::int64_t>, std::vector<VarId>> cflag;
    for (const auto& in : insts) {
      auto& iv = pdu[in.p];
      auto kk = static_cast<std::size_t>(in.k);
      auto& row = cflag[{in.p, in.k}];
      for (Value c = 1; c <= Om; ++c) {
        VarId b = P().add_var("c_P_" + cd.id + "_" + net.pdus[in.p].id + "_" + std::to_string(in.k) +
                                  "_" + std::to_string(c),
                              0, 1);
        P().add("pdu-containment", Reify{b, {eq(iv.n[kk], c), eq(iv.o[kk], 0)}});
        row.push_back(b);
      }
    }
    cv.len.assign(static_cast<std::size_t>(Om + 1), kNoVar);
    for (Value c = 1; c <= Om; ++c) {
      if (!dynamic) {
        cv.len[static_cast<std::size_t>(c)] = P().add_const(nm("len_P", cd.id, c), cd.length_bits);
        continue;
      }
      VarId len = P().add_var(nm("len_P", cd.id, c), cd.header_bits, cd.length_bits);
      cv.len[static_cast<std::size_t>(c)] = len;
      Linear l{{{1, len}}, Rel::Eq, cd.header_bits};
      for (const auto& in : insts)
        l.terms.push_back({-net.pdus[in.p].length_bits, cflag[{in.p, in.k}][static_cast<std::size_t>(c - 1)]});
      P().add("pdu-container-length", l);
    }

    if (tight) fullness(cidx, insts);

    // container triggers
    for (Value c = 1; c <= Om; ++c) {
      auto cc = static_cast<std::size_t>(c);
      VarId first = time_var(nm("first_P", cd.id, c));
      Extremum fm{first, true, cst(tsup), {}};
      for (const auto& in : insts)
        fm.terms.push_back({{eq(pdu[in.p].n[static_cast<std::size_t>(in.k)], c)},
                            var(pdu[in.p].alpha[static_cast<std::size_t>(in.k)])});
      P().add("pdu-container-trigger", fm);

      Extremum trig{time_var(nm("trig_P", cd.id, c)), true, cst(tsup), {}};
      if (cd.trigger_on_first) {
        VarId c1 = time_var(nm("alphaC1_P", cd.id, c));
        add("pdu-container-trigger", implies({}, {diff(c1, Rel::Eq, first, 0)}));
        trig.terms.push_back({{}, var(c1)});
      }
      if (cd.timeout_period) {
        Tick T = *cd.timeout_period;
        VarId ct = time_var(nm("alphaCT_P", cd.id, c));
        P().add("pdu-container-trigger", Extremum{ct, true, cst(tsup), {{{le(first, td.max - T)}, var(first, T)}}});
        trig.terms.push_back({{}, var(ct)});
      }
      if (threshold) {
        VarId cn = time_var(nm("alphaCn_P", cd.id, c));
        Extremum e{cn, true, cst(tsup), {}};
        for (const auto& me : insts) {
          auto mk = static_cast<std::size_t>(me.k);
          const std::string tag = net.pdus[me.p].id + "_" + std::to_string(me.k) + "_" + std::to_string(c);
          Linear sum{{}, Rel::Le, 0};
          Value maxfill = 0;
          for (const auto& other : insts) {
            VarId q = slot_flag("upto_P_" + net.pdus[other.p].id + "_" + std::to_string(other.k) + "_" + tag,
                                other, me, c, 0, cidx);
            sum.terms.push_back({net.pdus[other.p].length_bits, q});
            maxfill += net.pdus[other.p].length_bits;
          }
          VarId h = P().add_var("thr_P_" + tag, 0, 1);
          Value need = *cd.threshold_bits - cd.header_bits;  // fill must exceed this
          Linear lo = sum, hi = sum;
          hi.terms.push_back({-maxfill, h});
          hi.rel = Rel::Le;
          hi.rhs = need;
          lo.terms.push_back({-(need + 1), h});
          lo.rel = Rel::Ge;
          lo.rhs = 0;
          P().add("pdu-threshold", hi);
          P().add("pdu-threshold", lo);
          e.terms.push_back({{eq(pdu[me.p].n[mk], c), eq(h, 1)}, var(pdu[me.p].alpha[mk])});
        }
        P().add("pdu-container-trigger", e);
        trig.terms.push_back({{}, var(cn)});
      }
      P().add("pdu-container-trigger", trig);
      VarId raw = P().add_var(nm("raw_P", cd.id, c), td.min, tsup + 1);
      P().add("pdu-container-trigger",
              Extremum{raw, false, var(cv.sigma[cc - 1], 1), {{{}, var(trig.y)}}});
      P().add("pdu-container-trigger", Extremum{cv.alpha[cc], true, cst(tsup), {{{}, var(raw)}}});
    }
    pdu_order(cidx);
  }

  // A containee may pass over an instance only if it did not fit there at
  // its arrival.
  void fullness(std::size_t cidx, const std::vector<Inst>& insts) {
    const Pdu& cd = net.pdus[cidx];
    const Value Om = pdu[cidx].count;
    for (const auto& me : insts) {
      const Pdu& pd = net.pdus[me.p];
      auto& iv = pdu[me.p];
      auto mk = static_cast<std::size_t>(me.k);
      Value need = cd.length_bits - pd.length_bits - cd.header_bits + 1;
      for (Value c = 1; c <= Om; ++c) {
        const std::string tag = pd.id + "_" + std::to_string(me.k) + "_" + std::to_string(c);
        VarId skip = P().add_var("skip_P_" + tag, 0, 1);
        std::vector<Atom> atoms{le(iv.alpha[mk], td.max), le(iv.start[mk], c), ge(iv.n[mk], c + 1)};
        if (iv.join[mk] != kNoVar) atoms.push_back(eq(iv.join[mk], 0));
        P().add("pdu-fullness", Reify{skip, atoms});
        Linear l{{}, Rel::Ge, 0};
        for (const auto& other : insts) {
          if (other.p == me.p) continue;
          Value tie = other.pos < me.pos ? 0 : -1;
          VarId b = slot_flag("before_P_" + net.pdus[other.p].id + "_" + std::to_string(other.k) + "_" + tag,
                              other, me, c, tie, cidx);
          l.terms.push_back({net.pdus[other.p].length_bits, b});
        }
        l.terms.push_back({-need, skip});
        P().add("pdu-fullness", l);
        // printed form on final lengths (implied)
        std::vector<Atom> pre{le(iv.alpha[mk], td.max), le(iv.start[mk], c), ge(iv.n[mk], c + 1)};
        if (iv.join[mk] != kNoVar) pre.push_back(eq(iv.join[mk], 0));
        add("pdu-fullness",
            implies(pre, {ge(pdu[cidx].len[static_cast<std::size_t>(c)], cd.length_bits - pd.length_bits + 1)}));
      }
    }
  }

  void pdu_layer() {
    for (std::size_t p = 0; p < net.pdus.size(); ++p)
      if (!net.pdus[p].is_container) plain_pdu(p);
    for (std::size_t p = 0; p < net.pdus.size(); ++p) {
      if (net.pdus[p].is_container) container(p);
      if (net.pdus[p].in_container()) {
        auto& pv = pdu[p];
        for (std::int64_t k = 1; k <= pv.count; ++k)
          add("pdu-latch", implies({}, {diff(pv.sigma[static_cast<std::size_t>(k)], Rel::Eq,
                                             pv.alpha[static_cast<std::size_t>(k)], 0)}));
      }
    }
  }

  void frame_layer() {
    for (std::size_t f = 0; f < net.frames.size(); ++f) frame_instances(f);
    for (std::size_t b = 0; b < net.buses.size(); ++b) arbitration(b);
    for (std::size_t f = 0; f < net.frames.size(); ++f) reception(f);
  }

  void frame_instances(std::size_t f) {
    const Frame& fd = net.frames[f];
    auto& fv = frame[f];
    const Bus& bus = *net.find_bus(fd.bus);
    fv.count = bounds.frames.at(fd.id).last;
    const Value Om = fv.count;
    std::size_t tx = net.task_index(fd.tx_task);
    std::vector<VarId> acts = task_seq(tx);
    const auto M = static_cast<Value>(acts.size()) - 1;

    fv.copy.push_back(P().add_const(nm("copy_F", fd.id, 0), td.min - 1));
    for (Value x = 1; x <= Om; ++x) fv.copy.push_back(time_var(nm("copy_F", fd.id, x)));

    std::vector<std::size_t> pdus;
    for (const auto& pid : fd.pdus) pdus.push_back(net.pdu_index(pid));
    std::vector<Term> copy_terms;
    for (Value x = 1; x <= Om; ++x) copy_terms.push_back(var(fv.copy[static_cast<std::size_t>(x)]));

    for (std::size_t p : pdus) {
      auto& pv = pdu[p];
      pv.nF.assign(static_cast<std::size_t>(pv.count + 1), kNoVar);
      for (std::int64_t k = 1; k <= pv.count; ++k) {
        auto kk = static_cast<std::size_t>(k);
        VarId n = P().add_var(nm("n_F", net.pdus[p].id, k), 1, Om + 1);
        pv.nF[kk] = n;
        index_mapping("frame-mapping", pv.alpha[kk], 0, fv.copy, n, true);
        P().add("pdu-latch", Element{pv.sigma[kk], n, 1, copy_terms, cst(tsup)});
      }
    }

    for (Value x = 1; x <= Om; ++x) {
      auto xx = static_cast<std::size_t>(x);
      VarId af = time_var(nm("alpha_F", fd.id, x));
      Extremum e{af, true, cst(tsup), {}};
      Extremum causal{af, true, cst(tsup), {}};
      for (std::size_t p : pdus)
        for (std::int64_t k = 1; k <= pdu[p].count; ++k) {
          VarId a = pdu[p].alpha[static_cast<std::size_t>(k)];
          e.terms.push_back({{eq(pdu[p].nF[static_cast<std::size_t>(k)], x)}, var(a)});
          causal.terms.push_back({{diff(a, Rel::Ge, fv.copy[xx - 1], 1)}, var(a)});
        }
      P().add("frame-trigger", e);
      if (opt.redundant) P().add("frame-trigger-causal", causal);

      VarId j = P().add_var(nm("jtx_F", fd.id, x), 1, M + 1);
      index_mapping("frame-tx-selection", af, 0, acts, j, true);
      std::vector<Term> act_terms;
      for (Value m = 1; m <= M; ++m) act_terms.push_back(var(acts[static_cast<std::size_t>(m)]));
      P().add("frame-tx-selection", Element{fv.copy[xx], j, 1, act_terms, cst(tsup)});
      add_redundant("frame-tx-selection", implies({}, {diff(fv.copy[xx], Rel::Ge, af, 0)}));
      if (x > 1)
        add_redundant("frame-tx-selection",
                      implies({le(fv.copy[xx], td.max)}, {diff(fv.copy[xx], Rel::Ge, fv.copy[xx - 1], 1)}));

      // length: header plus the instance of each PDU carried here
      Value maxlen = fd.header_bits;
      Linear len_def{{}, Rel::Eq, fd.header_bits};
      for (std::size_t p : pdus) {
        const Pdu& pd = net.pdus[p];
        maxlen += pd.length_bits;
        VarId contrib = P().add_var("contrib_F_" + fd.id + "_" + pd.id + "_" + std::to_string(x), 0, pd.length_bits);
        Extremum mx{contrib, false, cst(0), {}};
        for (std::int64_t k = 1; k <= pdu[p].count; ++k) {
          Term len = pd.is_container ? var(pdu[p].len[static_cast<std::size_t>(k)]) : cst(pd.length_bits);
          mx.terms.push_back({{eq(pdu[p].nF[static_cast<std::size_t>(k)], x)}, len});
        }
        P().add("frame-length", mx);
        len_def.terms.push_back({-1, contrib});
      }
      VarId len = P().add_var(nm("len_F", fd.id, x), fd.header_bits, maxlen);
      len_def.terms.push_back({1, len});
      P().add("frame-length", len_def);
      fv.len.push_back(len);

      // duration: t_arb + floor(len * num / den) (+1 when rounded up)
      const Value num = bus.t_bit.num, den = bus.t_bit.den;
      VarId q = P().add_var(nm("fq_F", fd.id, x), 0, maxlen * num / den);
      VarId dur = P().add_var(nm("dur_F", fd.id, x), bus.t_arb, bus.t_arb + maxlen * num / den + 1);
      Linear dur_def{{{1, dur}, {-1, q}}, Rel::Eq, bus.t_arb};
      if (den > 1) {
        VarId rem = P().add_var(nm("rem_F", fd.id, x), 0, den - 1);
        P().add("frame-duration", Linear{{{num, len}, {-den, q}, {-1, rem}}, Rel::Eq, 0});
        VarId r = P().add_var(nm("r_F", fd.id, x), 0, 1);
        fv.round.push_back(r);
        add("frame-duration", implies({eq(r, 1)}, {ge(rem, 1)}));
        add("frame-duration", implies({ge(fv.copy[xx], tsup)}, {eq(r, 0)}));
        dur_def.terms.push_back({-1, r});
      } else {
        P().add("frame-duration", Linear{{{num, len}, {-1, q}}, Rel::Eq, 0});
      }
      P().add("frame-duration", dur_def);
      P().add("frame-duration-bounds",
              Linear{{{den, dur}, {-num, len}}, Rel::Ge, den * bus.t_arb - den + 1});
      P().add("frame-duration-bounds",
              Linear{{{den, dur}, {-num, len}}, Rel::Le, den * bus.t_arb + den - 1});

      VarId sigma = time_var(nm("sigma_F", fd.id, x));
      VarId raw = P().add_var(nm("eraw_F", fd.id, x), td.min, tsup + bus.t_arb + maxlen * num / den + 1);
      VarId eps = time_var(nm("eps_F", fd.id, x));
      P().add("frame-end", Linear{{{1, raw}, {-1, sigma}, {-1, dur}}, Rel::Eq, 0});
      P().add("frame-end", Extremum{eps, true, cst(tsup), {{{le(raw, td.max)}, var(raw)}}});
      add_redundant("frame-start", implies({}, {diff(sigma, Rel::Ge, fv.copy[xx], 0)}));
      fv.sigma.push_back(sigma);
      fv.eps.push_back(eps);
      fv.busy.push_back(P().add_var(nm("busy_F", fd.id, x), td.min - 1, tsup));
    }
    if (!fv.round.empty()) enc.round_up[fd.id] = fv.round;
  }

  void arbitration(std::size_t b) {
    const Bus& bus = net.buses[b];
    struct X {
      std::size_t f;
      Value x;
      std::int64_t prio;
    };
    std::vector<X> xs;
    for (std::size_t f = 0; f < net.frames.size(); ++f) {
      if (net.frames[f].bus != bus.id) continue;
      for (Value x = 1; x <= frame[f].count; ++x) xs.push_back({f, x, net.frames[f].priority});
    }
    auto copy = [&](const X& x) { return frame[x.f].copy[static_cast<std::size_t>(x.x)]; };
    auto sigma = [&](const X& x) { return frame[x.f].sigma[static_cast<std::size_t>(x.x - 1)]; };
    auto eps = [&](const X& x) { return frame[x.f].eps[static_cast<std::size_t>(x.x - 1)]; };
    auto busy = [&](const X& x) { return frame[x.f].busy[static_cast<std::size_t>(x.x - 1)]; };
    auto before = [](const X& a, const X& b) { return std::pair(a.prio, a.x) < std::pair(b.prio, b.x); };

    std::vector<X> by_key = xs;
    std::stable_sort(by_key.begin(), by_key.end(), before);
    for (const auto& x : by_key) sched.push_back(sigma(x));

    for (const auto& x : xs) {
      Extremum B{busy(x), false, cst(td.min - 1), {}};
      for (const auto& z : xs)
        if (&z != &x) B.terms.push_back({{diff(sigma(z), Rel::Le, sigma(x), -1)}, var(eps(z))});
      P().add("frame-start", B);
      P().add("frame-start", Extremum{sigma(x), false, var(copy(x)), {{{}, var(busy(x))}}});
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = 0; j < xs.size(); ++j) {
        if (i == j) continue;
        const X& x = xs[i];
        const X& y = xs[j];
        if (i < j)
          add("frame-nonoverlap", implies({le(sigma(x), td.max), le(sigma(y), td.max)},
                                          {diff(sigma(x), Rel::Ge, eps(y), 0), diff(sigma(y), Rel::Ge, eps(x), 0)}));
        if (before(y, x)) {
          // y has precedence: it cannot be pending while x starts
          add("frame-priority", implies({diff(copy(y), Rel::Le, sigma(x), 0), le(sigma(x), td.max)},
                                        {diff(sigma(y), Rel::Le, sigma(x), -1)}));
        } else {
          // x started while y waited: the bus must have been busy until then
          add("frame-work-conserving",
              implies({diff(copy(y), Rel::Le, sigma(x), -1), diff(sigma(x), Rel::Le, sigma(y), -1),
                       le(sigma(x), td.max)},
                      {diff(busy(x), Rel::Ge, sigma(x), 0)}));
        }
      }
    }
  }

  void reception(std::size_t f) {
    const Frame& fd = net.frames[f];
    auto& fv = frame[f];
    std::size_t rx = net.task_index(fd.rx_task);
    const CommTask& rt = net.tasks[rx];
    std::vector<VarId> acts = task_seq(rx);
    const auto R = static_cast<Value>(acts.size()) - 1;
    std::vector<Term> act_terms;
    for (Value m = 1; m <= R; ++m) act_terms.push_back(var(acts[static_cast<std::size_t>(m)]));
    for (Value x = 1; x <= fv.count; ++x) {
      auto xi = static_cast<std::size_t>(x - 1);
      VarId rho = P().add_var(nm("rho_F", fd.id, x), 1, R + 1);
      index_mapping("rx-selection", fv.eps[xi], rt.clock_drift, acts, rho, true);
      VarId act = time_var(nm("rxact_F", fd.id, x));
      P().add("rx-selection", Element{act, rho, 1, act_terms, cst(tsup)});
      VarId et = P().add_var(nm("epsT_F", fd.id, x), td.min + rt.deadline, tsup + rt.deadline);
      P().add("rx-deadline", Linear{{{1, et}, {-1, act}}, Rel::Eq, rt.deadline});
      fv.epsT.push_back(et);
    }
  }

  void objective() {
    const Signal& s = *net.find_signal(enc.signal);
    std::size_t p = net.pdu_index(s.pdu);
    const Pdu& pd = net.pdus[p];
    std::size_t carrier = pd.in_container() ? net.pdu_index(pd.container) : p;
    std::size_t f = net.frame_index(net.pdus[carrier].frame);
    const CommTask& rx = *net.find_task(net.frames[f].rx_task);
    const auto& occ = bounds.signals.at(s.id);
    auto& fv = frame[f];

    std::vector<Term> epsT_terms;
    for (VarId v : fv.epsT) epsT_terms.push_back(var(v));
    auto terms = [](const std::vector<VarId>& v) {
      std::vector<Term> t;
      for (std::size_t i = 1; i < v.size(); ++i) t.push_back(var(v[i]));
      return t;
    };

    VarId L = P().add_var("latency_" + s.id, -1, tsup + rx.deadline - td.min);
    Extremum obj{L, false, cst(-1), {}};
    for (std::int64_t j = occ.first; j <= occ.last; ++j) {
      auto jj = static_cast<std::size_t>(j - occ.first);
      VarId phi = enc.phi[s.id][jj];
      VarId n = nS[s.id][jj];
      std::vector<Atom> guard;
      VarId fi;
      if (pd.in_container()) {
        VarId c = P().add_var(nm("co_S", s.id, j), 1, pdu[carrier].count + 1);
        P().add("latency", Element{c, n, 1, terms(pdu[p].n), cst(pdu[carrier].count + 1)});
        VarId ov = P().add_var(nm("ov_S", s.id, j), 0, 1);
        P().add("latency", Element{ov, n, 1, terms(pdu[p].o), cst(1)});
        fi = P().add_var(nm("nfo_S", s.id, j), 1, fv.count + 1);
        P().add("latency", Element{fi, c, 1, terms(pdu[carrier].nF), cst(fv.count + 1)});
        guard.push_back(eq(ov, 0));
      } else {
        fi = P().add_var(nm("nfo_S", s.id, j), 1, fv.count + 1);
        P().add("latency", Element{fi, n, 1, terms(pdu[p].nF), cst(fv.count + 1)});
      }
      VarId ea = P().add_var(nm("ea_S", s.id, j), td.min + rx.deadline, tsup + rx.deadline);
      P().add("latency", Element{ea, fi, 1, epsT_terms, cst(tsup + rx.deadline)});
      VarId raw = P().add_var(nm("lraw_S", s.id, j), td.min + rx.deadline - td.max, tsup + rx.deadline - td.min);
      P().add("latency", Linear{{{1, raw}, {-1, ea}, {1, phi}}, Rel::Eq, 0});
      VarId lat = P().add_var(nm("lat_S", s.id, j), -1, tsup + rx.deadline - td.min);
      guard.push_back(le(ea, td.max + rx.deadline));
      P().add("latency", Extremum{lat, false, cst(-1), {{guard, var(raw)}}});
      obj.terms.push_back({{}, var(lat)});
      enc.latency.push_back(lat);
    }
    P().add("objective", obj);
    P().set_objective(L);

    for (const auto& [id, v] : enc.round_up) order.insert(order.end(), v.begin(), v.end());
    P().set_search_order(order);
    P().set_schedule_vars(sched);
  }
};

Encoder::Encoder(const NetworkModel& net, std::string objective_signal, EncodeOptions opt)
    : impl_(new Impl(net, std::move(objective_signal), opt)) {}
Encoder::~Encoder() { delete impl_; }
void Encoder::encode_signal_layer() { impl_->signal_layer(); }
void Encoder::encode_pdu_layer() { impl_->pdu_layer(); }
void Encoder::encode_frame_layer() { impl_->frame_layer(); }
void Encoder::encode_objective() { impl_->objective(); }
Encoding Encoder::take() { return std::move(impl_->enc); }

Encoding build_problem(const NetworkModel& net, const std::string& objective_signal,
                       EncodeOptions opt) {
  Encoder e(net, objective_signal, opt);
  e.encode_signal_layer();
  e.encode_pdu_layer();
  e.encode_frame_layer();
  e.encode_objective();
  Encoding enc = e.take();
  enc.problem.check_well_formed();
  return enc;
}

Scenario extract_scenario(const Encoding& enc, const Assignment& a) {
  Scenario s;
  for (const auto& [id, vs] : enc.phi)
    for (VarId v : vs) s.signals[id].push_back(a[v]);
  for (const auto& [id, vs] : enc.activation)
    for (VarId v : vs) s.tasks[id].push_back(a[v]);
  for (const auto& [id, vs] : enc.round_up)
    for (VarId v : vs) s.round_up[id].push_back(static_cast<int>(a[v]));
  return s;
}

NetworkModel with_horizon(NetworkModel net, HorizonOptions opt) {
  Tick h = analysis_horizon(net, opt);
  net.time = TimeDomain::up_to(h, net.time.min);
  return net;
}

std::map<std::string, std::size_t> schema_counts(const ConstraintProblem& p) {
  std::map<std::string, std::size_t> out;
  for (const auto& c : p.constraints())
    if (!c.continues) ++out[c.schema];
  return out;
}

}  // namespace wclat

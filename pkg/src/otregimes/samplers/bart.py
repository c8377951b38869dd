"""Probit sum-of-trees sampler (backfitting MCMC with data augmentation).

Model: a latent variable Z_i = sum_t g(x_i; tree_t) + eps_i with eps_i ~ N(0,1)
and Y_i = 1{Z_i > 0}. Each tree's structure carries a regularization prior in
which a node at depth delta splits with probability kappa*(1+delta)**(-eta),
splitting variables and cutpoints are uniform (cutpoints on an equally spaced
grid per covariate over its observed range), and leaf means are N(0, leaf_sd^2).

One sweep redraws Z from its truncated normal full conditional, then visits
every tree: a Metropolis-Hastings structure move (grow / prune / change / swap
with probabilities 0.25 / 0.25 / 0.40 / 0.10) evaluated under the integrated
leaf-mean likelihood, followed by a conjugate redraw of that tree's leaf means.
Kept sweeps record Phi(sum of trees) at the evaluation points, where Phi is the
standard normal CDF.
"""

import math

import numpy as np
from scipy.special import ndtr, ndtri
from sklearn.base import BaseEstimator

from .._validation import as_binary_vector, as_float_matrix, check_same_length
from ..errors import SingleClassError
from .base import BartConfig, clip_probabilities

MOVE_PROBS = {"grow": 0.25, "prune": 0.25, "change": 0.40, "swap": 0.10}

_TINY = 1e-300


class _Tree:
    """One regression tree, heap-indexed (root 1, children 2i and 2i+1).

    Only leaves carry row sets; internal nodes carry split rules. The tree's
    current contribution to the forest fit is materialized in g_tr / g_ev.
    """

    __slots__ = ("var", "cut", "leaves", "rows_tr", "rows_ev", "g_tr", "g_ev")

    def __init__(self, n_tr, n_ev):
        self.var = {}
        self.cut = {}
        self.leaves = {1}
        self.rows_tr = {1: np.arange(n_tr)}
        self.rows_ev = {1: np.arange(n_ev)}
        self.g_tr = np.zeros(n_tr)
        self.g_ev = np.zeros(n_ev)

    def prunable(self):
        """Internal nodes whose both children are leaves, in sorted order."""
        return sorted(n for n in self.var
                      if 2 * n in self.leaves and 2 * n + 1 in self.leaves)

    def leaves_under(self, node):
        shift = node.bit_length()
        return sorted(l for l in self.leaves
                      if l == node or (l.bit_length() >= shift
                                       and l >> (l.bit_length() - shift) == node))


def _depth(node):
    return node.bit_length() - 1


class _BartChain:
    def __init__(self, X_tr, y, X_ev, cfg: BartConfig, rng):
        n, p = X_tr.shape
        self.rng = rng
        self.cfg = cfg
        self.p = p
        self.cols_tr = [np.ascontiguousarray(X_tr[:, j]) for j in range(p)]
        self.cols_ev = [np.ascontiguousarray(X_ev[:, j]) for j in range(p)]
        self.grids = [np.linspace(c.min(), c.max(), cfg.n_cutpoints)
                      for c in self.cols_tr]
        self.s2 = cfg.resolved_leaf_sd ** 2
        # Split-probability tables by depth; 64 levels is far beyond reach
        # under the regularization prior.
        psplit = [cfg.kappa * (1.0 + d) ** (-cfg.eta) for d in range(64)]
        self.log_psplit = [math.log(v) for v in psplit]
        self.log_qsplit = [math.log1p(-v) for v in psplit]
        self.pos_idx = np.flatnonzero(y == 1.0)
        self.neg_idx = np.flatnonzero(y == 0.0)
        self.trees = [_Tree(n, X_ev.shape[0]) for _ in range(cfg.num_trees)]
        self.z = np.zeros(n)
        self.f_tr = np.zeros(n)
        self.f_ev = np.zeros(X_ev.shape[0])
        self.accepted = dict.fromkeys(MOVE_PROBS, 0)
        self.proposed = dict.fromkeys(MOVE_PROBS, 0)

    # -- latent variable augmentation ------------------------------------

    def _draw_latents(self):
        """Redraw Z ~ N(f, 1) truncated to Z > 0 where y=1 and Z <= 0 where y=0.

        Inverse-CDF sampling in the numerically stable direction for each
        class; the final clamp guards the (unreachable under the shrinkage
        prior) deep-tail underflow so sign(Z) always matches y.
        """
        rng = self.rng
        pos, neg = self.pos_idx, self.neg_idx
        if pos.size:
            f = self.f_tr[pos]
            t = np.clip(rng.random(pos.size) * ndtr(f), _TINY, None)
            self.z[pos] = np.maximum(f - ndtri(t), 1e-12)
        if neg.size:
            f = self.f_tr[neg]
            t = np.clip(rng.random(neg.size) * ndtr(-f), _TINY, None)
            self.z[neg] = np.minimum(f + ndtri(t), 0.0)

    # -- integrated leaf likelihood ---------------------------------------

    def _leaf_loglik(self, n, S):
        # Marginal likelihood of a leaf's residuals with the mean integrated
        # out under N(0, s2); terms free of the leaf partition are dropped
        # since they cancel in every acceptance ratio.
        denom = 1.0 + n * self.s2
        return -0.5 * math.log(denom) + 0.5 * self.s2 * S * S / denom

    # -- routing -----------------------------------------------------------

    def _route(self, node, rows_tr, rows_ev, var, cut, overrides):
        """Partition rows through the subtree at `node`, with rules overridden
        at the nodes listed in `overrides`. Returns (rows_tr, rows_ev) dicts
        keyed by leaf, or None if any leaf would hold no training rows."""
        if node not in var and node not in overrides:
            if rows_tr.size == 0:
                return None
            return {node: rows_tr}, {node: rows_ev}
        v, c = overrides.get(node, (var.get(node), cut.get(node)))
        mask_tr = self.cols_tr[v][rows_tr] <= c
        mask_ev = self.cols_ev[v][rows_ev] <= c
        left = self._route(2 * node, rows_tr[mask_tr], rows_ev[mask_ev],
                           var, cut, overrides)
        if left is None:
            return None
        right = self._route(2 * node + 1, rows_tr[~mask_tr], rows_ev[~mask_ev],
                            var, cut, overrides)
        if right is None:
            return None
        left[0].update(right[0])
        left[1].update(right[1])
        return left

    # -- structure moves ---------------------------------------------------

    def _propose_rule(self):
        var = int(self.rng.integers(self.p))
        grid = self.grids[var]
        cut = float(grid[int(self.rng.integers(grid.size))])
        return var, cut

    def _try_grow(self, tree, resid):
        leaves = sorted(tree.leaves)
        node = leaves[int(self.rng.integers(len(leaves)))]
        var, cut = self._propose_rule()
        rows = tree.rows_tr[node]
        mask = self.cols_tr[var][rows] <= cut
        n_left = int(mask.sum())
        if n_left == 0 or n_left == rows.size:
            return False
        left, right = rows[mask], rows[~mask]
        S = float(resid[rows].sum())
        S_left = float(resid[left].sum())
        loglik = (self._leaf_loglik(left.size, S_left)
                  + self._leaf_loglik(right.size, S - S_left)
                  - self._leaf_loglik(rows.size, S))
        d = _depth(node)
        log_prior = (self.log_psplit[d] + 2.0 * self.log_qsplit[d + 1]
                     - self.log_qsplit[d])
        # Number of prunable nodes after the grow: the grown node becomes
        # prunable; its parent stops being prunable if its sibling is a leaf.
        n_prunable_new = len(tree.prunable()) + 1
        if node > 1 and (node ^ 1) in tree.leaves:
            n_prunable_new -= 1
        log_trans = (math.log(MOVE_PROBS["prune"] / MOVE_PROBS["grow"])
                     + math.log(len(leaves)) - math.log(n_prunable_new))
        if math.log(self.rng.random()) >= log_prior + log_trans + loglik:
            return False
        ev_rows = tree.rows_ev[node]
        mask_ev = self.cols_ev[var][ev_rows] <= cut
        tree.var[node] = var
        tree.cut[node] = cut
        tree.leaves.discard(node)
        tree.leaves.update((2 * node, 2 * node + 1))
        tree.rows_tr[2 * node], tree.rows_tr[2 * node + 1] = left, right
        tree.rows_ev[2 * node] = ev_rows[mask_ev]
        tree.rows_ev[2 * node + 1] = ev_rows[~mask_ev]
        del tree.rows_tr[node], tree.rows_ev[node]
        return True

    def _try_prune(self, tree, resid):
        prunable = tree.prunable()
        if not prunable:
            return False
        node = prunable[int(self.rng.integers(len(prunable)))]
        left, right = tree.rows_tr[2 * node], tree.rows_tr[2 * node + 1]
        S_left = float(resid[left].sum())
        S_right = float(resid[right].sum())
        loglik = (self._leaf_loglik(left.size + right.size, S_left + S_right)
                  - self._leaf_loglik(left.size, S_left)
                  - self._leaf_loglik(right.size, S_right))
        d = _depth(node)
        log_prior = -(self.log_psplit[d] + 2.0 * self.log_qsplit[d + 1]
                      - self.log_qsplit[d])
        n_leaves_new = len(tree.leaves) - 1
        log_trans = (math.log(MOVE_PROBS["grow"] / MOVE_PROBS["prune"])
                     + math.log(len(prunable)) - math.log(n_leaves_new))
        if math.log(self.rng.random()) >= log_prior + log_trans + loglik:
            return False
        tree.rows_tr[node] = np.concatenate((left, right))
        tree.rows_ev[node] = np.concatenate((tree.rows_ev[2 * node],
                                             tree.rows_ev[2 * node + 1]))
        for child in (2 * node, 2 * node + 1):
            tree.leaves.discard(child)
            del tree.rows_tr[child], tree.rows_ev[child]
        tree.leaves.add(node)
        del tree.var[node], tree.cut[node]
        return True

    def _subtree_rows(self, tree, node):
        leaves = tree.leaves_under(node)
        rows_tr = np.concatenate([tree.rows_tr[l] for l in leaves])
        rows_ev = np.concatenate([tree.rows_ev[l] for l in leaves])
        return leaves, rows_tr, rows_ev

    def _reroute_accept(self, tree, resid, node, overrides):
        """Shared accept/apply logic for change and swap: re-route the subtree
        under `node` with rule overrides; Metropolis-accept on the likelihood
        ratio (proposals are symmetric and the uniform rule priors cancel)."""
        old_leaves, rows_tr, rows_ev = self._subtree_rows(tree, node)
        routed = self._route(node, rows_tr, rows_ev, tree.var, tree.cut, overrides)
        if routed is None:
            return False
        new_tr, new_ev = routed
        loglik = 0.0
        for leaf, rows in new_tr.items():
            loglik += self._leaf_loglik(rows.size, float(resid[rows].sum()))
        for leaf in old_leaves:
            rows = tree.rows_tr[leaf]
            loglik -= self._leaf_loglik(rows.size, float(resid[rows].sum()))
        if math.log(self.rng.random()) >= loglik:
            return False
        for var_node, (v, c) in overrides.items():
            tree.var[var_node] = v
            tree.cut[var_node] = c
        for leaf in old_leaves:
            del tree.rows_tr[leaf], tree.rows_ev[leaf]
        tree.rows_tr.update(new_tr)
        tree.rows_ev.update(new_ev)
        return True

    def _try_change(self, tree, resid):
        if not tree.var:
            return False
        internal = sorted(tree.var)
        node = internal[int(self.rng.integers(len(internal)))]
        var, cut = self._propose_rule()
        return self._reroute_accept(tree, resid, node, {node: (var, cut)})

    def _try_swap(self, tree, resid):
        pairs = [(n, child) for n in sorted(tree.var)
                 for child in (2 * n, 2 * n + 1) if child in tree.var]
        if not pairs:
            return False
        parent, child = pairs[int(self.rng.integers(len(pairs)))]
        overrides = {parent: (tree.var[child], tree.cut[child]),
                     child: (tree.var[parent], tree.cut[parent])}
        return self._reroute_accept(tree, resid, parent, overrides)

    # -- sweeps ------------------------------------------------------------

    def _update_tree(self, tree):
        resid = self.z - self.f_tr + tree.g_tr
        u = self.rng.random()
        if u < 0.25:
            move, try_move = "grow", self._try_grow
        elif u < 0.50:
            move, try_move = "prune", self._try_prune
        elif u < 0.90:
            move, try_move = "change", self._try_change
        else:
            move, try_move = "swap", self._try_swap
        self.proposed[move] += 1
        if try_move(tree, resid):
            self.accepted[move] += 1

        # Conjugate leaf-mean draws given the (possibly new) structure.
        leaves = sorted(tree.leaves)
        noise = self.rng.standard_normal(len(leaves))
        g_tr = np.empty_like(tree.g_tr)
        g_ev = np.empty_like(tree.g_ev)
        for i, leaf in enumerate(leaves):
            rows = tree.rows_tr[leaf]
            v = self.s2 / (1.0 + rows.size * self.s2)
            value = v * float(resid[rows].sum()) + math.sqrt(v) * noise[i]
            g_tr[rows] = value
            g_ev[tree.rows_ev[leaf]] = value
        self.f_tr += g_tr - tree.g_tr
        self.f_ev += g_ev - tree.g_ev
        tree.g_tr = g_tr
        tree.g_ev = g_ev

    def run(self):
        cfg = self.cfg
        total = cfg.burn_in + cfg.draws * cfg.thin
        out = np.empty((cfg.draws, self.f_ev.size))
        kept = 0
        for sweep in range(total):
            self._draw_latents()
            for tree in self.trees:
                self._update_tree(tree)
            offset = sweep - cfg.burn_in
            if offset >= 0 and offset % cfg.thin == 0:
                out[kept] = ndtr(self.f_ev)
                kept += 1
        return out


def fit_probit_bart(y, X, cfg: BartConfig, X_eval=None) -> np.ndarray:
    """Posterior success-probability draws at the evaluation points.

    Returns a (draws, n_eval) matrix of P(Y=1 | x) draws, strictly inside
    (0, 1). X_eval defaults to the training covariates; sum-of-trees state is
    not retained across draws, so evaluation points must be supplied here.
    """
    X = as_float_matrix(X, "X")
    y = as_binary_vector(y, "y")
    check_same_length(X.shape[0], (y, "y"))
    if X.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    if y.min() == y.max():
        raise SingleClassError("outcome contains a single class; cannot fit")
    X_eval = X if X_eval is None else as_float_matrix(X_eval, "X_eval")
    if X_eval.shape[1] != X.shape[1]:
        raise ValueError("X_eval must have the same number of columns as X")
    rng = np.random.default_rng(cfg.seed)
    chain = _BartChain(X, y, X_eval, cfg, rng)
    return clip_probabilities(chain.run())


class BartProbitSampler(BaseEstimator):
    """Estimator wrapper around :func:`fit_probit_bart`.

    After fit: `prob_draws_` holds the (draws, n_eval) probability draws at
    X_eval (default: the training points). Evaluation points must be supplied
    at fit time.
    """

    def __init__(self, num_trees=50, kappa=0.95, eta=2.0, k=2.0, leaf_sd=None,
                 n_cutpoints=100, draws=5000, burn_in=1000, thin=1, seed=0):
        self.num_trees = num_trees
        self.kappa = kappa
        self.eta = eta
        self.k = k
        self.leaf_sd = leaf_sd
        self.n_cutpoints = n_cutpoints
        self.draws = draws
        self.burn_in = burn_in
        self.thin = thin
        self.seed = seed

    def _config(self):
        return BartConfig(draws=self.draws, burn_in=self.burn_in, thin=self.thin,
                          seed=self.seed, num_trees=self.num_trees,
                          kappa=self.kappa, eta=self.eta, k=self.k,
                          leaf_sd=self.leaf_sd, n_cutpoints=self.n_cutpoints)

    def fit(self, X, y, X_eval=None):
        self.prob_draws_ = fit_probit_bart(y, X, self._config(), X_eval=X_eval)
        return self

    def predict_proba(self, X=None):
        if X is not None:
            raise ValueError("evaluation points must be supplied to fit(..., X_eval=)")
        mean = self.prob_draws_.mean(axis=0)
        return np.column_stack([1.0 - mean, mean])

    def predict(self, X=None):
        return (self.predict_proba(X)[:, 1] > 0.5).astype(int)

"""Static word vectors plus a small bidirectional LSTM language model.

The LM trains both directions jointly: the forward negative log likelihood
conditions each token on its predecessors (framed by <bos>), the backward one
on its successors (framed by <eos>), and the training objective is their sum.
Embedding table and softmax projection are shared between directions; each
direction owns its LSTM stack. Contextual token vectors mix the per-layer
hidden-state pairs with softmax-normalized scalars.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    EmptyCorpus,
    EmptySequence,
    InconsistentDimension,
    ShapeMismatch,
    UnreadableFile,
)
from .nn import Adam, LSTMCell, save_params, load_params, softmax_xent

log = logging.getLogger(__name__)

PAD, UNK, BOS, EOS = 0, 1, 2, 3
RESERVED = ("<pad>", "<unk>", "<bos>", "<eos>")


class Vocab:
    """Dense token index; reserved slots first, then frequency desc, then lex."""

    def __init__(self, tokens: list[str], min_freq: int = 1):
        self.min_freq = min_freq
        self.id_to_token = list(RESERVED) + list(tokens)
        self.token_to_id = {t: i for i, t in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise ValueError("duplicate tokens in vocabulary")

    @classmethod
    def build(cls, token_lists, min_freq: int = 1) -> "Vocab":
        counts: dict[str, int] = {}
        for tokens in token_lists:
            for t in tokens:
                counts[t] = counts.get(t, 0) + 1
        kept = sorted(
            (t for t, c in counts.items() if c >= min_freq and t not in RESERVED),
            key=lambda t: (-counts[t], t),
        )
        return cls(kept, min_freq=min_freq)

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def encode(self, tokens) -> list[int]:
        return [self.token_to_id.get(t, UNK) for t in tokens]

    def real_tokens(self) -> list[str]:
        return self.id_to_token[len(RESERVED):]


def build_vocab(corpus, min_freq: int = 1) -> Vocab:
    """Vocabulary over a corpus's tokenized tweets; deterministic ordering."""
    if not corpus.tweets:
        raise EmptyCorpus("cannot build a vocabulary from an empty corpus")
    return Vocab.build(
        (corpus.tweets[tid].tokens for tid in sorted(corpus.tweets)),
        min_freq=min_freq,
    )


class StaticEmbeddingTable:
    """Context-independent token vectors (GloVe text format on disk)."""

    def __init__(self, dim: int, vectors: dict[str, np.ndarray], oov_policy: str = "zero"):
        if oov_policy not in ("zero", "mean"):
            raise ValueError(f"unknown OOV policy {oov_policy!r}")
        self.dim = dim
        self.vectors = vectors
        self.oov_policy = oov_policy
        if vectors:
            self._mean = np.mean(list(vectors.values()), axis=0)
        else:
            self._mean = np.zeros(dim)

    def lookup(self, token: str) -> np.ndarray:
        hit = self.vectors.get(token)
        if hit is not None:
            return hit
        return self._mean if self.oov_policy == "mean" else np.zeros(self.dim)

    def coverage(self, vocab: Vocab) -> float:
        real = vocab.real_tokens()
        if not real:
            return 0.0
        return sum(t in self.vectors for t in real) / len(real)


def load_static_embeddings(path, vocab: Vocab | None = None, oov_policy: str = "zero") -> StaticEmbeddingTable:
    """Read `token v1 ... vd` lines; keep in-vocab rows when a vocab is given."""
    keep = None if vocab is None else set(vocab.token_to_id)
    vectors: dict[str, np.ndarray] = {}
    dim = None
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise UnreadableFile(f"cannot open {path}: {exc}") from None
    with fh:
        for line_num, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            token, raw = parts[0], parts[1:]
            if dim is None:
                dim = len(raw)
                if dim == 0:
                    raise InconsistentDimension(f"line {line_num}: no vector values")
            if len(raw) != dim:
                raise InconsistentDimension(
                    f"line {line_num}: expected {dim} values, got {len(raw)}"
                )
            try:
                vec = np.array([float(v) for v in raw], dtype=np.float64)
            except ValueError:
                raise UnreadableFile(
                    f"line {line_num}: non-numeric vector value"
                ) from None
            if keep is None or token in keep:
                vectors[token] = vec
    if dim is None:
        raise UnreadableFile(f"{path} holds no vectors")
    table = StaticEmbeddingTable(dim, vectors, oov_policy)
    if vocab is not None:
        log.info("static vectors: %d loaded, vocab coverage %.1f%%",
                 len(vectors), 100.0 * table.coverage(vocab))
    return table


def seeded_random_table(vocab: Vocab, dim: int, seed: int, oov_policy: str = "zero") -> StaticEmbeddingTable:
    """Deterministic random vectors for runs that have no GloVe file."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, dim)))
    tokens = sorted(vocab.real_tokens())
    mat = rng.normal(0.0, 1.0 / np.sqrt(dim), size=(len(tokens), dim))
    return StaticEmbeddingTable(dim, dict(zip(tokens, mat)), oov_policy)


@dataclass
class LmConfig:
    embed_dim: int = 64
    hidden_dim: int = 128
    layers: int = 2
    lr: float = 1e-3
    batch_size: int = 32
    epochs: int = 5
    seed: int = 0
    # softmax-mixing scalars for contextual vectors; zeros = uniform mixing
    mix_scalars: list[float] | None = None

    def __post_init__(self):
        if self.embed_dim > self.hidden_dim:
            raise ShapeMismatch(
                "embed_dim must not exceed hidden_dim "
                "(layer-0 states are zero-padded embeddings)"
            )


class BiLstmLm:
    """Two L-layer LSTM stacks over a shared embedding and softmax projection."""

    def __init__(self, vocab: Vocab, config: LmConfig):
        self.vocab = vocab
        self.config = config
        rng = np.random.default_rng(config.seed)
        v, de, h = len(vocab), config.embed_dim, config.hidden_dim
        bound = 1.0 / np.sqrt(de)
        self.embed = rng.uniform(-bound, bound, size=(v, de))
        self.fwd = [
            LSTMCell.create(rng, de if l == 0 else h, h) for l in range(config.layers)
        ]
        self.bwd = [
            LSTMCell.create(rng, de if l == 0 else h, h) for l in range(config.layers)
        ]
        sbound = 1.0 / np.sqrt(h)
        self.ws = rng.uniform(-sbound, sbound, size=(v, h))
        self.bs = np.zeros(v)

    # -- parameter plumbing ------------------------------------------------

    def params(self) -> dict[str, np.ndarray]:
        out = {"embed": self.embed, "ws": self.ws, "bs": self.bs}
        for tag, stack in (("fwd", self.fwd), ("bwd", self.bwd)):
            for l, cell in enumerate(stack):
                for k, arr in cell.params().items():
                    out[f"{tag}{l}.{k}"] = arr
        return out

    def zero_softmax(self):
        """Uniform predictive distribution: per-token NLL becomes ln V."""
        self.ws[:] = 0.0
        self.bs[:] = 0.0
        return self

    # -- core batched graph --------------------------------------------------

    def _frame(self, id_seqs):
        """Padded input/target/mask arrays for both directions.

        Forward predicts x_i from [<bos>, x_1 .. x_{i-1}]; backward predicts
        x_i from [<eos>, x_n .. x_{i+1}] (the sequence reversed). Exactly n
        prediction terms per direction, none for the frame symbols.
        """
        batch = len(id_seqs)
        t_len = max(len(s) for s in id_seqs)
        fwd_in = np.full((t_len, batch), PAD, dtype=np.int64)
        fwd_tgt = np.full((t_len, batch), PAD, dtype=np.int64)
        bwd_in = np.full((t_len, batch), PAD, dtype=np.int64)
        bwd_tgt = np.full((t_len, batch), PAD, dtype=np.int64)
        mask = np.zeros((t_len, batch))
        for b, seq in enumerate(id_seqs):
            n = len(seq)
            if n == 0:
                continue
            rev = seq[::-1]
            fwd_in[:n, b] = [BOS] + seq[:-1]
            fwd_tgt[:n, b] = seq
            bwd_in[:n, b] = [EOS] + rev[:-1]
            bwd_tgt[:n, b] = rev
            mask[:n, b] = 1.0
        return fwd_in, fwd_tgt, bwd_in, bwd_tgt, mask

    def _run_direction(self, cells, ids, mask):
        xs = self.embed[ids]  # [T, B, de]
        caches = []
        layer_hs = []
        h = xs
        for cell in cells:
            h, cache = cell.forward_seq(h, mask)
            caches.append((cell, cache))
            layer_hs.append(h)
        return xs, layer_hs, caches

    def _direction_loss(self, cells, ids, targets, mask, scale, grads):
        """Summed masked NLL for one direction; accumulates grads if given."""
        t_len, batch = ids.shape
        xs, layer_hs, caches = self._run_direction(cells, ids, mask)
        h = layer_hs[-1].reshape(t_len * batch, -1)
        logits = h @ self.ws.T + self.bs
        loss, dlogits = softmax_xent(logits, targets.reshape(-1), mask.reshape(-1))
        if grads is None:
            return loss
        dlogits *= scale
        grads["ws"] += dlogits.T @ h
        grads["bs"] += dlogits.sum(axis=0)
        dtop = (dlogits @ self.ws).reshape(t_len, batch, -1)
        dh = dtop
        tag = "fwd" if cells is self.fwd else "bwd"
        for l in range(len(cells) - 1, -1, -1):
            cell, cache = caches[l]
            dh, cell_grads = cell.backward_seq(dh, cache)
            for k, g in cell_grads.items():
                grads[f"{tag}{l}.{k}"] += g
        np.add.at(grads["embed"], ids.reshape(-1), dh.reshape(t_len * batch, -1))
        return loss

    def loss_and_grads(self, id_seqs):
        """Mean per-prediction joint NLL and its gradients over a batch."""
        fwd_in, fwd_tgt, bwd_in, bwd_tgt, mask = self._frame(id_seqs)
        n_predictions = 2.0 * mask.sum()
        grads = {k: np.zeros_like(v) for k, v in self.params().items()}
        scale = 1.0 / n_predictions
        loss = self._direction_loss(self.fwd, fwd_in, fwd_tgt, mask, scale, grads)
        loss += self._direction_loss(self.bwd, bwd_in, bwd_tgt, mask, scale, grads)
        return loss / n_predictions, grads

    # -- spec operations -----------------------------------------------------

    def nll(self, token_ids: list[int]) -> tuple[float, float, float]:
        """(forward NLL, backward NLL, joint) summed over the sequence."""
        if not token_ids:
            raise EmptySequence("language model needs at least one token")
        fwd_in, fwd_tgt, bwd_in, bwd_tgt, mask = self._frame([list(token_ids)])
        fwd = self._direction_loss(self.fwd, fwd_in, fwd_tgt, mask, 1.0, None)
        bwd = self._direction_loss(self.bwd, bwd_in, bwd_tgt, mask, 1.0, None)
        return fwd, bwd, fwd + bwd

    def perplexity(self, id_seqs) -> float:
        """exp of the mean per-prediction NLL across both directions."""
        total = 0.0
        n_tokens = 0
        for seq in id_seqs:
            if not seq:
                continue
            total += self.nll(seq)[2]
            n_tokens += len(seq)
        if n_tokens == 0:
            raise EmptySequence("no tokens to evaluate")
        return float(np.exp(total / (2.0 * n_tokens)))

    def fit(self, id_seqs, log_every: int = 1) -> list[float]:
        """Mini-batch Adam on the joint objective; returns per-epoch mean NLL."""
        seqs = [s for s in id_seqs if s]
        if not seqs:
            raise EmptyCorpus("no non-empty sequences to train on")
        cfg = self.config
        rng = np.random.default_rng(cfg.seed + 1)
        opt = Adam(self.params(), lr=cfg.lr)
        history = []
        for epoch in range(cfg.epochs):
            order = rng.permutation(len(seqs))
            total, count = 0.0, 0
            for start in range(0, len(seqs), cfg.batch_size):
                batch = [seqs[i] for i in order[start : start + cfg.batch_size]]
                loss, grads = self.loss_and_grads(batch)
                opt.step(grads)
                n = 2 * sum(len(s) for s in batch)
                total += loss * n
                count += n
            history.append(total / count)
            if log_every and (epoch + 1) % log_every == 0:
                log.info("lm epoch %d/%d mean joint NLL per token %.4f",
                         epoch + 1, cfg.epochs, history[-1])
        return history

    # -- contextual states -----------------------------------------------------

    def states(self, token_ids: list[int]):
        """Per-token, per-layer hidden states for one sequence.

        Returns (embeds [n, de], fwd [L, n, h], bwd [L, n, h]) where fwd[l][i]
        depends only on tokens 1..i+1 and bwd[l][i] only on tokens i+1..n.
        """
        if not token_ids:
            raise EmptySequence("cannot contextualize an empty sequence")
        n = len(token_ids)
        ids = list(token_ids)
        fwd_in = np.array([[BOS] + ids]).T  # [n+1, 1]
        bwd_in = np.array([[EOS] + ids[::-1]]).T
        _, fwd_hs, _ = self._run_direction(self.fwd, fwd_in, None)
        _, bwd_hs, _ = self._run_direction(self.bwd, bwd_in, None)
        h = self.config.hidden_dim
        fwd_states = np.empty((self.config.layers, n, h))
        bwd_states = np.empty((self.config.layers, n, h))
        for l in range(self.config.layers):
            fwd_states[l] = fwd_hs[l][1:, 0, :]
            # position p in the reversed run consumed x_n .. x_{n-p+1}
            bwd_states[l] = bwd_hs[l][1:, 0, :][::-1]
        return self.embed[ids], fwd_states, bwd_states

    def mix_weights(self, scalars=None) -> np.ndarray:
        k = self.config.layers + 1
        if scalars is None:
            scalars = self.config.mix_scalars or [0.0] * k
        scalars = np.asarray(scalars, dtype=np.float64)
        if scalars.shape != (k,):
            raise ShapeMismatch(f"need {k} mixing scalars, got {scalars.shape}")
        e = np.exp(scalars - scalars.max())
        return e / e.sum()

    def pooled_context_blocks(self, id_seqs, batch_size: int = 128) -> np.ndarray:
        """Token-mean of the per-layer context blocks for many sequences.

        Returns [N, L+1, 2h]; empty sequences give zero rows. The pooled
        values equal the mean over context_blocks() rows, computed batched.
        """
        n_layers = self.config.layers
        h = self.config.hidden_dim
        de = self.config.embed_dim
        out = np.zeros((len(id_seqs), n_layers + 1, 2 * h))
        nonempty = [i for i, s in enumerate(id_seqs) if s]
        for start in range(0, len(nonempty), batch_size):
            chunk = nonempty[start : start + batch_size]
            seqs = [id_seqs[i] for i in chunk]
            b = len(seqs)
            t_len = max(len(s) for s in seqs) + 1  # leading frame symbol
            fwd_in = np.full((t_len, b), PAD, dtype=np.int64)
            bwd_in = np.full((t_len, b), PAD, dtype=np.int64)
            run_mask = np.zeros((t_len, b))
            tok_mask = np.zeros((t_len, b))
            for col, seq in enumerate(seqs):
                n = len(seq)
                fwd_in[: n + 1, col] = [BOS] + seq
                bwd_in[: n + 1, col] = [EOS] + seq[::-1]
                run_mask[: n + 1, col] = 1.0
                tok_mask[1 : n + 1, col] = 1.0
            _, fwd_hs, _ = self._run_direction(self.fwd, fwd_in, run_mask)
            _, bwd_hs, _ = self._run_direction(self.bwd, bwd_in, run_mask)
            counts = tok_mask.sum(axis=0)
            for col, seq in enumerate(seqs):
                emb_mean = self.embed[seq].mean(axis=0)
                row = chunk[col]
                out[row, 0, :de] = emb_mean
                out[row, 0, h : h + de] = emb_mean
            for l in range(n_layers):
                # mean over token positions; order does not matter for a mean
                fwd_mean = np.einsum("tbh,tb->bh", fwd_hs[l], tok_mask) / counts[:, None]
                bwd_mean = np.einsum("tbh,tb->bh", bwd_hs[l], tok_mask) / counts[:, None]
                for col, row in enumerate(chunk):
                    out[row, l + 1, :h] = fwd_mean[col]
                    out[row, l + 1, h:] = bwd_mean[col]
        return out

    def context_blocks(self, token_ids) -> np.ndarray:
        """[L+1, n, 2h] blocks; layer 0 is the padded embedding duplicated."""
        embeds, fwd_states, bwd_states = self.states(token_ids)
        n = len(token_ids)
        h = self.config.hidden_dim
        blocks = np.zeros((self.config.layers + 1, n, 2 * h))
        blocks[0, :, : embeds.shape[1]] = embeds
        blocks[0, :, h : h + embeds.shape[1]] = embeds
        for l in range(self.config.layers):
            blocks[l + 1, :, :h] = fwd_states[l]
            blocks[l + 1, :, h:] = bwd_states[l]
        return blocks

    # -- persistence -----------------------------------------------------------

    def save(self, path):
        meta = {
            "kind": "bilstm-lm",
            "vocab": self.vocab.id_to_token,
            "min_freq": self.vocab.min_freq,
            "config": {
                "embed_dim": self.config.embed_dim,
                "hidden_dim": self.config.hidden_dim,
                "layers": self.config.layers,
                "lr": self.config.lr,
                "batch_size": self.config.batch_size,
                "epochs": self.config.epochs,
                "seed": self.config.seed,
                "mix_scalars": self.config.mix_scalars,
            },
        }
        save_params(path, self.params(), meta)

    @classmethod
    def load(cls, path) -> "BiLstmLm":
        params, meta = load_params(path)
        if meta.get("kind") != "bilstm-lm":
            raise UnreadableFile(f"{path} is not a language-model checkpoint")
        tokens = meta["vocab"][len(RESERVED):]
        vocab = Vocab(tokens, min_freq=meta.get("min_freq", 1))
        lm = cls(vocab, LmConfig(**meta["config"]))
        for name, arr in lm.params().items():
            arr[:] = params[name]
        return lm


def train_lm(corpus, vocab: Vocab, config: LmConfig) -> BiLstmLm:
    """Train a fresh biLSTM LM on a corpus's tokenized tweets."""
    lm = BiLstmLm(vocab, config)
    seqs = [vocab.encode(corpus.tweets[tid].tokens) for tid in sorted(corpus.tweets)]
    lm.fit(seqs)
    return lm


def contextualize(lm: BiLstmLm, mix_scalars, tokens_or_ids) -> np.ndarray:
    """Per-token contextual vectors [n, 2h], softmax-mixed across layers."""
    ids = _as_ids(lm.vocab, tokens_or_ids)
    if not ids:
        raise EmptySequence("cannot contextualize an empty sequence")
    w = lm.mix_weights(mix_scalars)
    blocks = lm.context_blocks(ids)
    return np.einsum("k,knd->nd", w, blocks)


def embed_tweet(tokens, table: StaticEmbeddingTable, lm: BiLstmLm, mix_scalars=None) -> np.ndarray:
    """Mean-pooled static vector next to mean-pooled contextual vector."""
    d = table.dim
    h2 = 2 * lm.config.hidden_dim
    if not tokens:
        return np.zeros(d + h2)
    static = np.mean([table.lookup(t) for t in _as_tokens(tokens)], axis=0)
    ctx = contextualize(lm, mix_scalars, tokens).mean(axis=0)
    return np.concatenate([static, ctx])


def _as_ids(vocab: Vocab, tokens_or_ids) -> list[int]:
    seq = list(tokens_or_ids)
    if seq and isinstance(seq[0], str):
        return vocab.encode(seq)
    return seq


def _as_tokens(tokens) -> list[str]:
    if tokens and not isinstance(tokens[0], str):
        raise ShapeMismatch("static lookup needs string tokens")
    return list(tokens)

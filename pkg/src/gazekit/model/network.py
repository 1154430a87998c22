"""Pre-norm ViT encoder, masked-autoencoder decoder, and gaze head.

Parameters live in a flat dict of named autodiff Tensors so the optimizer and
checkpoint code can treat them uniformly. Positional embeddings are fixed 2D
sinusoids, not parameters.
"""

from dataclasses import asdict, dataclass

import numpy as np

from gazekit.autodiff import Tensor, constant, parameter
from gazekit.autodiff import ops as O
from gazekit.errors import ShapeError
from gazekit.model.masking import MaskPlan
from gazekit.model.patches import PatchGrid, patchify


@dataclass(frozen=True)
class ModelConfig:
    image_size: int = 32
    patch_size: int = 4
    channels: int = 3
    depth: int = 4
    heads: int = 4
    embed_dim: int = 64
    mlp_ratio: float = 4.0
    decoder_depth: int = 2
    decoder_dim: int = 32
    decoder_heads: int = 4
    mask_ratio: float = 0.75
    pixel_norm: bool = True
    pooling: str = "mean"

    def __post_init__(self):
        if self.embed_dim % self.heads != 0:
            raise ShapeError(f"ModelConfig: embed_dim {self.embed_dim} not divisible by heads {self.heads}")
        if self.decoder_dim % self.decoder_heads != 0:
            raise ShapeError(
                f"ModelConfig: decoder_dim {self.decoder_dim} not divisible by decoder_heads {self.decoder_heads}"
            )
        if self.pooling != "mean":
            raise ShapeError(f"ModelConfig: unsupported pooling {self.pooling!r}")
        # instantiating the grid validates divisibility
        PatchGrid(self.image_size, self.patch_size, self.channels)

    @property
    def grid(self) -> PatchGrid:
        return PatchGrid(self.image_size, self.patch_size, self.channels)

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "ModelConfig":
        return ModelConfig(**d)


def _sincos_1d(dim: int, positions: np.ndarray) -> np.ndarray:
    omega = 1.0 / 10000.0 ** (np.arange(dim // 2, dtype=np.float64) / (dim / 2.0))
    angles = positions[:, None] * omega[None, :]
    return np.concatenate([np.sin(angles), np.cos(angles)], axis=1)


def sincos_position_table(embed_dim: int, grid_side: int) -> np.ndarray:
    """Fixed 2D sin/cos positional table, (grid_side^2, embed_dim)."""
    if embed_dim % 4 != 0:
        raise ShapeError(f"sincos_position_table: embed_dim {embed_dim} must be divisible by 4")
    ys, xs = np.meshgrid(np.arange(grid_side), np.arange(grid_side), indexing="ij")
    return np.concatenate(
        [
            _sincos_1d(embed_dim // 2, ys.reshape(-1).astype(np.float64)),
            _sincos_1d(embed_dim // 2, xs.reshape(-1).astype(np.float64)),
        ],
        axis=1,
    )


INPUT_CENTER = 0.5  # [0,1] pixel values are centered before embedding


def init_params(cfg: ModelConfig, seed: int, dtype=np.float64, head_init: str = "zeros") -> dict:
    """Deterministic parameter initialization: xavier-uniform projection
    matrices, zero biases, unit layer-norm gains, N(0, 0.02) mask token. The
    gaze head starts at zero unless head_init='normal' (useful for gradient
    checks at the L1 kink)."""
    rng = np.random.default_rng(seed)
    p = {}

    def w(name, *shape):
        if len(shape) == 2:
            limit = np.sqrt(6.0 / (shape[0] + shape[1]))
            p[name] = parameter(rng.uniform(-limit, limit, size=shape).astype(dtype))
        else:
            p[name] = parameter(rng.normal(0.0, 0.02, size=shape).astype(dtype))

    def zeros(name, *shape):
        p[name] = parameter(np.zeros(shape, dtype=dtype))

    def ones(name, *shape):
        p[name] = parameter(np.ones(shape, dtype=dtype))

    grid = cfg.grid
    e, dd = cfg.embed_dim, cfg.decoder_dim
    hidden = int(e * cfg.mlp_ratio)
    dec_hidden = int(dd * cfg.mlp_ratio)

    w("patch_embed.w", grid.patch_dim, e)
    zeros("patch_embed.b", e)

    def block(prefix, dim, hid):
        ones(f"{prefix}.ln1.g", dim)
        zeros(f"{prefix}.ln1.b", dim)
        for proj in ("q", "k", "v", "o"):
            w(f"{prefix}.attn.w{proj}", dim, dim)
            zeros(f"{prefix}.attn.b{proj}", dim)
        ones(f"{prefix}.ln2.g", dim)
        zeros(f"{prefix}.ln2.b", dim)
        w(f"{prefix}.mlp.w1", dim, hid)
        zeros(f"{prefix}.mlp.b1", hid)
        w(f"{prefix}.mlp.w2", hid, dim)
        zeros(f"{prefix}.mlp.b2", dim)

    for i in range(cfg.depth):
        block(f"enc.{i}", e, hidden)
    ones("enc.norm.g", e)
    zeros("enc.norm.b", e)

    w("dec.embed.w", e, dd)
    zeros("dec.embed.b", dd)
    w("mask_token", dd)
    for i in range(cfg.decoder_depth):
        block(f"dec.{i}", dd, dec_hidden)
    ones("dec.norm.g", dd)
    zeros("dec.norm.b", dd)
    w("dec.pred.w", dd, grid.patch_dim)
    zeros("dec.pred.b", grid.patch_dim)

    if head_init == "normal":
        w("head.w", e, 2)
        w("head.b", 2)
    else:
        zeros("head.w", e, 2)
        zeros("head.b", 2)
    return p


def _affine_norm(params, prefix, x):
    return O.add(O.mul(O.layer_norm(x, axis=-1), params[f"{prefix}.g"]), params[f"{prefix}.b"])


def _linear(params, prefix, flat):
    return O.add(O.matmul(flat, params[f"{prefix}.w"]), params[f"{prefix}.b"])


def _attention(params, prefix, x, heads, collect_attn=None):
    b, t, c = x.shape
    dh = c // heads
    flat = O.reshape(x, (b * t, c))

    def split(name):
        proj = O.add(O.matmul(flat, params[f"{prefix}.w{name}"]), params[f"{prefix}.b{name}"])
        return O.reshape(O.transpose(O.reshape(proj, (b, t, heads, dh)), (0, 2, 1, 3)), (b * heads, t, dh))

    q, k, v = split("q"), split("k"), split("v")
    scores = O.scalar_mul(O.matmul(q, O.transpose(k, (0, 2, 1))), 1.0 / np.sqrt(dh))
    attn = O.softmax(scores, axis=-1)
    if collect_attn is not None:
        collect_attn.append(attn)
    ctx = O.matmul(attn, v)
    ctx = O.reshape(O.transpose(O.reshape(ctx, (b, heads, t, dh)), (0, 2, 1, 3)), (b * t, c))
    out = O.add(O.matmul(ctx, params[f"{prefix}.wo"]), params[f"{prefix}.bo"])
    return O.reshape(out, (b, t, c))


def _transformer_block(params, prefix, x, heads, collect_attn=None):
    h = _affine_norm(params, f"{prefix}.ln1", x)
    x = O.add(x, _attention(params, f"{prefix}.attn", h, heads, collect_attn))
    h = _affine_norm(params, f"{prefix}.ln2", x)
    b, t, c = h.shape
    flat = O.reshape(h, (b * t, c))
    m = O.matmul(O.gelu(O.add(O.matmul(flat, params[f"{prefix}.mlp.w1"]), params[f"{prefix}.mlp.b1"])), params[f"{prefix}.mlp.w2"])
    m = O.add(m, params[f"{prefix}.mlp.b2"])
    return O.add(x, O.reshape(m, (b, t, c)))


def _broadcast_const(table: np.ndarray, batch: int, dtype) -> Tensor:
    return constant(np.broadcast_to(table, (batch,) + table.shape).astype(dtype, copy=True))


def encoder_forward(params, cfg: ModelConfig, tokens: np.ndarray, position_ids=None, collect_attn=None) -> Tensor:
    """Run the encoder over patch tokens.

    tokens: (B, T, patch_dim) array (or (T, patch_dim) for one image).
    position_ids: patch indices for the sinusoidal table, or None to skip
    positional embeddings entirely (used by the equivariance tests).
    """
    tokens = np.asarray(tokens)
    if tokens.ndim == 2:
        tokens = tokens[None]
    b, t, d = tokens.shape
    if d != cfg.grid.patch_dim:
        raise ShapeError(f"encoder_forward: token dim {d} != patch_dim {cfg.grid.patch_dim}")
    dtype = params["patch_embed.w"].dtype

    # center pixel values so content and positional signals start at
    # comparable scale
    x = constant((tokens - INPUT_CENTER).astype(dtype, copy=False))
    flat = O.reshape(x, (b * t, d))
    emb = _linear(params, "patch_embed", flat)
    x = O.reshape(emb, (b, t, cfg.embed_dim))

    if position_ids is not None:
        table = sincos_position_table(cfg.embed_dim, cfg.grid.side)[np.asarray(position_ids)]
        x = O.add(x, _broadcast_const(table, b, dtype))

    for i in range(cfg.depth):
        x = _transformer_block(params, f"enc.{i}", x, cfg.heads, collect_attn)
    if cfg.depth > 0:
        x = _affine_norm(params, "enc.norm", x)
    return x


def decoder_forward(params, cfg: ModelConfig, encoder_out: Tensor, plan: MaskPlan) -> Tensor:
    """Reconstruct all N patches from encoder output over the visible set.

    Inserts the learned mask token at masked positions, adds decoder
    positional embeddings, runs the shallow decoder, and projects each token
    to patch_dim. Output is (B, N, patch_dim) in raster order.
    """
    b, v, e = encoder_out.shape
    if v != len(plan.visible_ids):
        raise ShapeError(
            f"decoder_forward: encoder produced {v} tokens but plan has {len(plan.visible_ids)} visible"
        )
    n = plan.n_patches
    if n != cfg.grid.n_patches:
        raise ShapeError(f"decoder_forward: plan covers {n} patches, grid has {cfg.grid.n_patches}")
    dd = cfg.decoder_dim
    dtype = params["dec.embed.w"].dtype
    m = len(plan.masked_ids)

    dec_tokens = O.reshape(_linear(params, "dec.embed", O.reshape(encoder_out, (b * v, e))), (b, v, dd))

    # expand the mask token to (m, b, dd) through a constant ones matmul so
    # its gradient accumulates over every insertion
    ones = constant(np.ones((m * b, 1), dtype=dtype))
    mask_tok = O.reshape(O.matmul(ones, O.reshape(params["mask_token"], (1, dd))), (m, b, dd))

    seq = O.concat([O.transpose(dec_tokens, (1, 0, 2)), mask_tok], axis=0)  # (N, B, dd)
    order = np.concatenate([plan.visible_ids, plan.masked_ids])
    seq = O.gather_rows(seq, np.argsort(order))
    x = O.transpose(seq, (1, 0, 2))  # (B, N, dd) raster order

    table = sincos_position_table(dd, cfg.grid.side)
    x = O.add(x, _broadcast_const(table, b, dtype))

    for i in range(cfg.decoder_depth):
        x = _transformer_block(params, f"dec.{i}", x, cfg.decoder_heads)
    if cfg.decoder_depth > 0:
        x = _affine_norm(params, "dec.norm", x)
    pred = _linear(params, "dec.pred", O.reshape(x, (b * n, dd)))
    return O.reshape(pred, (b, n, cfg.grid.patch_dim))


def mae_forward(params, cfg: ModelConfig, patches: np.ndarray, plan: MaskPlan) -> Tensor:
    """Full masked-autoencoder pass: encode visible patches, decode all."""
    patches = np.asarray(patches)
    if patches.ndim == 2:
        patches = patches[None]
    visible = patches[:, plan.visible_ids, :]
    enc = encoder_forward(params, cfg, visible, plan.visible_ids)
    return decoder_forward(params, cfg, enc, plan)


def gaze_forward(params, cfg: ModelConfig, images: np.ndarray) -> Tensor:
    """Full-token encoder pass, mean-pool to the latent, linear head to
    (pitch, yaw). images: (B, H, W, C) or a single (H, W, C)."""
    images = np.asarray(images)
    if images.ndim == 3:
        images = images[None]
    patches = patchify(images, cfg.grid)
    enc = encoder_forward(params, cfg, patches, np.arange(cfg.grid.n_patches))
    z = O.mean(enc, axis=1)
    return _linear(params, "head", z)

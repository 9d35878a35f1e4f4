"""Intrinsic PL surfaces and embedded triangle meshes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import kernels


class MeshError(ValueError):
    """Base class for mesh construction problems.

    ``index`` names the offending element (face, edge or line) when known.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ParseError(MeshError):
    pass


class ValidationError(MeshError):
    pass


def _edge_key(u, v):
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class PLSurface:
    """Simplicial surface carrying a flat metric on every face.

    The metric is stored as one positive length per undirected edge; there
    are no coordinates.  ``face_edges[f, k]`` is the edge opposite corner
    ``k`` of face ``f``.
    """

    n_vertices: int
    faces: np.ndarray
    edges: np.ndarray
    edge_lengths: np.ndarray
    face_edges: np.ndarray
    edge_face_count: np.ndarray
    orientable: bool
    n_components: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_faces(self):
        return int(self.faces.shape[0])

    @property
    def n_edges(self):
        return int(self.edges.shape[0])

    @property
    def boundary_edges(self):
        return self.edge_face_count == 1

    @property
    def is_closed(self):
        return not bool(self.boundary_edges.any())

    @property
    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_faces

    def face_lengths(self):
        """(F, 3) lengths, column k opposite corner k."""
        return self.edge_lengths[self.face_edges]

    def corner_angles(self):
        """(F, 3) interior angle at each face corner, from edge lengths only."""
        if "corner_angles" not in self._cache:
            fl = self.face_lengths()
            out = np.empty_like(fl)
            for k in range(3):
                opp = np.ascontiguousarray(fl[:, k])
                a = np.ascontiguousarray(fl[:, (k + 1) % 3])
                b = np.ascontiguousarray(fl[:, (k + 2) % 3])
                out[:, k] = kernels.corner_angles(opp, a, b)
            out.setflags(write=False)
            self._cache["corner_angles"] = out
        return self._cache["corner_angles"]

    def vertex_angle_sums(self):
        return np.bincount(
            self.faces.ravel(), weights=self.corner_angles().ravel(), minlength=self.n_vertices
        )

    def boundary_vertex_mask(self):
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.edges[self.boundary_edges].ravel()] = True
        return mask

    def vertex_face_count(self):
        return np.bincount(self.faces.ravel(), minlength=self.n_vertices)

    def face_areas(self):
        """Heron's formula on the per-face lengths."""
        a, b, c = self.face_lengths().T
        # numerically stable ordering (Kahan)
        s = np.sort(np.stack([a, b, c]), axis=0)[::-1]
        a, b, c = s
        q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
        return 0.25 * np.sqrt(np.maximum(q, 0.0))

    def length(self, u, v):
        idx = self.edge_index().get(_edge_key(int(u), int(v)))
        if idx is None:
            raise KeyError(f"no edge ({u}, {v})")
        return float(self.edge_lengths[idx])

    def edge_index(self):
        if "edge_index" not in self._cache:
            self._cache["edge_index"] = {
                (int(u), int(v)): i for i, (u, v) in enumerate(self.edges)
            }
        return self._cache["edge_index"]

    def scaled(self, factor):
        """Same combinatorics, every length multiplied by ``factor``."""
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return _assemble(
            self.n_vertices, self.faces, self.edges, self.edge_lengths * factor, self.face_edges,
            self.edge_face_count,
        )

    def edge_length_table(self):
        return {(int(u), int(v)): float(l) for (u, v), l in zip(self.edges, self.edge_lengths)}


@dataclass(frozen=True)
class MeshTopologyReport:
    n_vertices: int
    n_edges: int
    n_faces: int
    euler_characteristic: int
    orientable: bool
    boundary_component_count: int


def _faces_array(faces):
    arr = np.asarray(faces)
    if arr.size == 0:
        raise ValidationError("surface has no faces")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValidationError("faces must be vertex triples")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.round(arr)):
            raise ValidationError("face indices must be integers")
    return np.ascontiguousarray(arr, dtype=np.int64)


def _combinatorics(n_vertices, faces):
    """Edge table, face->edge map and edge multiplicities; checks manifold edges."""
    if faces.min() < 0 or faces.max() >= n_vertices:
        bad = int(np.nonzero((faces < 0).any(1) | (faces >= n_vertices).any(1))[0][0])
        raise ValidationError(f"face {bad} references a missing vertex", bad)
    for f, (a, b, c) in enumerate(faces):
        if a == b or b == c or a == c:
            raise ValidationError(f"face {f} repeats a vertex", f)
    # column k is the edge opposite corner k
    opp = np.stack(
        [faces[:, [1, 2]], faces[:, [2, 0]], faces[:, [0, 1]]], axis=1
    )  # (F, 3, 2)
    pairs = np.sort(opp.reshape(-1, 2), axis=1)
    edges, inverse, counts = np.unique(pairs, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    if counts.max() > 2:
        e = int(np.argmax(counts))
        raise ValidationError(
            f"non-manifold edge {tuple(int(x) for x in edges[e])} borders {counts[e]} faces", e
        )
    face_edges = inverse.reshape(-1, 3)
    return edges.astype(np.int64), face_edges.astype(np.int64), counts.astype(np.int64)


def _face_components(n_vertices, faces):
    parent = np.arange(n_vertices)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, c in faces:
        ra, rb, rc = find(a), find(b), find(c)
        parent[rb] = ra
        parent[find(rc)] = ra
    used = np.unique(faces)
    return len({find(v) for v in used})


def _orientable(faces, face_edges, counts):
    """Propagate a consistent orientation across interior edges; False on conflict."""
    n_f = faces.shape[0]
    # for every edge, the (face, sign) incidences; sign +1 if face traverses u->v with u<v
    inc = [[] for _ in range(len(counts))]
    for f in range(n_f):
        for k in range(3):
            u = faces[f, (k + 1) % 3]
            v = faces[f, (k + 2) % 3]
            inc[face_edges[f, k]].append((f, 1 if u < v else -1))
    flip = np.zeros(n_f, dtype=np.int8)
    seen = np.zeros(n_f, dtype=bool)
    nbrs = [[] for _ in range(n_f)]
    for lst in inc:
        if len(lst) == 2:
            (f, s), (g, t) = lst
            # consistent iff the two faces traverse the edge in opposite directions
            nbrs[f].append((g, s == t))
            nbrs[g].append((f, s == t))
    for start in range(n_f):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        while stack:
            f = stack.pop()
            for g, must_flip in nbrs[f]:
                want = flip[f] ^ int(must_flip)
                if not seen[g]:
                    seen[g] = True
                    flip[g] = want
                    stack.append(g)
                elif flip[g] != want:
                    return False
    return True


def _assemble(n_vertices, faces, edges, lengths, face_edges, counts, allow_disconnected=False):
    lengths = np.asarray(lengths, dtype=float)
    bad = np.nonzero(~np.isfinite(lengths) | (lengths <= 0))[0]
    if bad.size:
        e = int(bad[0])
        raise ValidationError(
            f"edge {tuple(int(x) for x in edges[e])} has non-positive or non-finite length "
            f"{lengths[e]!r}",
            e,
        )
    fl = lengths[face_edges]
    s = np.sort(fl, axis=1)
    viol = np.nonzero(s[:, 2] >= s[:, 0] + s[:, 1])[0]
    if viol.size:
        f = int(viol[0])
        raise ValidationError(
            f"face {f} {tuple(int(x) for x in faces[f])} violates the triangle inequality "
            f"with lengths {tuple(float(x) for x in fl[f])}",
            f,
        )
    n_comp = _face_components(n_vertices, faces)
    if n_comp > 1 and not allow_disconnected:
        raise ValidationError(f"surface has {n_comp} connected components")
    for arr in (faces, edges, lengths, face_edges, counts):
        arr.setflags(write=False)
    return PLSurface(
        n_vertices=int(n_vertices),
        faces=faces,
        edges=edges,
        edge_lengths=lengths,
        face_edges=face_edges,
        edge_face_count=counts,
        orientable=_orientable(faces, face_edges, counts),
        n_components=n_comp,
    )


def build_pl_surface(
    lengths: Mapping[tuple[int, int], float],
    faces,
    n_vertices: int | None = None,
    allow_disconnected: bool = False,
) -> PLSurface:
    """Build an intrinsic surface from an edge-length table.

    ``lengths`` maps unordered vertex pairs to lengths; identifications such
    as a flat torus are expressed by reusing vertex indices in ``faces``.
    """
    faces = _faces_array(faces)
    if n_vertices is None:
        n_vertices = int(faces.max()) + 1
    edges, face_edges, counts = _combinatorics(n_vertices, faces)
    table = {_edge_key(int(u), int(v)): float(l) for (u, v), l in lengths.items()}
    vals = np.empty(len(edges))
    for i, (u, v) in enumerate(edges):
        key = (int(u), int(v))
        if key not in table:
            raise ValidationError(f"missing length for edge {key}", i)
        vals[i] = table[key]
    return _assemble(n_vertices, faces, edges, vals, face_edges, counts, allow_disconnected)


@dataclass(frozen=True, eq=False)
class EmbeddedMesh:
    vertices: np.ndarray
    faces: np.ndarray
    surface: PLSurface

    @property
    def n_vertices(self):
        return int(self.vertices.shape[0])

    @property
    def dim(self):
        return int(self.vertices.shape[1])

    def face_normals(self):
        """Unnormalised normals (3D only), length = twice the face area."""
        v = self.vertices
        f = self.faces
        return np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])

    def signed_volume(self):
        v = self.vertices
        f = self.faces
        return float(np.einsum("ij,ij->i", v[f[:, 0]], np.cross(v[f[:, 1]], v[f[:, 2]])).sum() / 6.0)

    def centroid(self):
        return self.vertices.mean(axis=0)

    def transformed(self, matrix=None, offset=None):
        x = self.vertices
        if matrix is not None:
            x = x @ np.asarray(matrix, dtype=float).T
        if offset is not None:
            x = x + np.asarray(offset, dtype=float)
        return embedded_mesh(x, self.faces)


def embedded_mesh(vertices, faces, allow_disconnected=False) -> EmbeddedMesh:
    """Validated mesh with vertex coordinates in R^n, n >= 2."""
    x = np.array(vertices, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValidationError("vertex coordinates must be an (N, n) array with n >= 2")
    if not np.all(np.isfinite(x)):
        bad = int(np.nonzero(~np.isfinite(x).all(1))[0][0])
        raise ValidationError(f"vertex {bad} has non-finite coordinates", bad)
    faces = _faces_array(faces)
    edges, face_edges, counts = _combinatorics(len(x), faces)
    # Gram determinant works in any ambient dimension
    u = x[faces[:, 1]] - x[faces[:, 0]]
    w = x[faces[:, 2]] - x[faces[:, 0]]
    uu = np.einsum("ij,ij->i", u, u)
    ww = np.einsum("ij,ij->i", w, w)
    uw = np.einsum("ij,ij->i", u, w)
    gram = uu * ww - uw * uw
    degen = np.nonzero(gram <= 1e-24 * np.maximum(uu * ww, np.finfo(float).tiny))[0]
    if degen.size:
        f = int(degen[0])
        raise ValidationError(f"face {f} {tuple(int(i) for i in faces[f])} is degenerate", f)
    lengths = np.linalg.norm(x[edges[:, 0]] - x[edges[:, 1]], axis=1)
    surf = _assemble(len(x), faces, edges, lengths, face_edges, counts, allow_disconnected)
    x.setflags(write=False)
    return EmbeddedMesh(vertices=x, faces=surf.faces, surface=surf)


def total_vertex_angle(s: PLSurface, v: int) -> float:
    """Sum of the face-corner angles at ``v`` (radians)."""
    v = int(v)
    if not 0 <= v < s.n_vertices:
        raise IndexError(f"vertex {v} does not exist")
    mask = s.faces == v
    if not mask.any():
        raise ValidationError(f"vertex {v} is isolated", v)
    return float(s.corner_angles()[mask].sum())


def topology_report(s: PLSurface) -> MeshTopologyReport:
    bedges = s.edges[s.boundary_edges]
    n_loops = 0
    if len(bedges):
        # components of the boundary-edge graph
        parent = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in bedges:
            parent[find(int(u))] = find(int(v))
        n_loops = len({find(int(u)) for u in bedges.ravel()})
    return MeshTopologyReport(
        n_vertices=s.n_vertices,
        n_edges=s.n_edges,
        n_faces=s.n_faces,
        euler_characteristic=s.euler_characteristic,
        orientable=s.orientable,
        boundary_component_count=n_loops,
    )


# ---------------------------------------------------------------------------
# barycentric grids on faces (shared by n^2-subdivision and metric refinement


def face_layout(a, b, c):
    """Planar positions of corners 0, 1, 2 for a face with lengths
    ``a = |12|``, ``b = |20|``, ``c = |01|``."""
    x = (c * c + b * b - a * a) / (2.0 * c)
    y = np.sqrt(max(b * b - x * x, 0.0))
    return np.array([[0.0, 0.0], [c, 0.0], [x, y]])


class FaceGrid:
    """Vertices of the level-``n`` barycentric grid on every face.

    Original vertices keep their indices; edge points and face-interior
    points are appended.  ``points[f]`` holds the grid indices of face ``f``
    in (j, k) order and ``coords[f]`` their planar layout.
    """

    def __init__(self, s: PLSurface, n: int):
        if n < 1:
            raise ValueError("grid level must be >= 1")
        self.n = n
        self.surface = s
        nv = s.n_vertices
        ne = s.n_edges
        jk = [(j, k) for k in range(n + 1) for j in range(n + 1 - k)]
        self.jk = np.array(jk, dtype=np.int64)
        self.slot = {p: i for i, p in enumerate(jk)}
        n_edge_pts = n - 1
        n_int = (n - 1) * (n - 2) // 2
        self.n_points = nv + ne * n_edge_pts + s.n_faces * n_int
        fl = s.face_lengths()
        points = np.empty((s.n_faces, len(jk)), dtype=np.int64)
        coords = np.empty((s.n_faces, len(jk), 2))
        for f in range(s.n_faces):
            tri = s.faces[f]
            lay = face_layout(*fl[f])
            int_base = nv + ne * n_edge_pts + f * n_int
            int_ctr = 0
            for idx, (j, k) in enumerate(jk):
                i = n - j - k
                w = (i, j, k)
                coords[f, idx] = (i * lay[0] + j * lay[1] + k * lay[2]) / n
                nz = [c for c in range(3) if w[c] > 0]
                if len(nz) == 1:
                    points[f, idx] = tri[nz[0]]
                elif len(nz) == 2:
                    c0, c1 = nz
                    u, v = int(tri[c0]), int(tri[c1])
                    e = s.face_edges[f, 3 - c0 - c1]
                    # position counted from the smaller-index endpoint
                    t = w[c1] if u < v else w[c0]
                    points[f, idx] = nv + e * n_edge_pts + (t - 1)
                else:
                    points[f, idx] = int_base + int_ctr
                    int_ctr += 1
        self.points = points
        self.coords = coords

    def sub_faces(self):
        """Local (slot) triples of the n^2 child triangles, parent orientation."""
        n = self.n
        out = []
        for k in range(n):
            for j in range(n - k):
                out.append((self.slot[(j, k)], self.slot[(j + 1, k)], self.slot[(j, k + 1)]))
                if j + k <= n - 2:
                    out.append(
                        (self.slot[(j + 1, k)], self.slot[(j + 1, k + 1)], self.slot[(j, k + 1)])
                    )
        return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------------------
# OFF / OBJ


def _number(tok, lineno, path):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: expected a number, got {tok!r}", lineno) from None


def _index(tok, lineno, path):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: expected an integer, got {tok!r}", lineno) from None


def parse_off(text, path="<off>"):
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if s:
            lines.append((lineno, s.split()))
    if not lines:
        raise ParseError(f"{path}: empty file")
    lineno, head = lines[0]
    if not head[0].upper().endswith("OFF"):
        raise ParseError(f"{path}:{lineno}: missing OFF header", lineno)
    if head[0].upper() != "OFF":
        raise ParseError(f"{path}:{lineno}: unsupported OFF variant {head[0]!r}", lineno)
    rest = head[1:]
    pos = 1
    if not rest:
        if len(lines) < 2:
            raise ParseError(f"{path}: missing counts line")
        lineno, rest = lines[1]
        pos = 2
    if len(rest) < 2:
        raise ParseError(f"{path}:{lineno}: counts line needs vertex and face counts", lineno)
    nv, nf = _index(rest[0], lineno, path), _index(rest[1], lineno, path)
    if nv < 0 or nf < 0 or len(lines) < pos + nv + nf:
        raise ParseError(f"{path}: file truncated (expected {nv} vertices, {nf} faces)")
    verts = []
    for lineno, toks in lines[pos:pos + nv]:
        verts.append([_number(t, lineno, path) for t in toks])
    dims = {len(v) for v in verts}
    if len(dims) != 1:
        raise ParseError(f"{path}: vertices have inconsistent dimensions")
    faces = []
    for lineno, toks in lines[pos + nv:pos + nv + nf]:
        k = _index(toks[0], lineno, path)
        if k != 3:
            raise ParseError(f"{path}:{lineno}: only triangular faces are supported", lineno)
        if len(toks) < 4:
            raise ParseError(f"{path}:{lineno}: face line too short", lineno)
        tri = [_index(t, lineno, path) for t in toks[1:4]]
        for i in tri:
            if not 0 <= i < nv:
                raise ParseError(f"{path}:{lineno}: face references missing vertex {i}", lineno)
        faces.append(tri)
    return np.array(verts, dtype=float), np.array(faces, dtype=np.int64).reshape(-1, 3)


def parse_obj(text, path="<obj>"):
    verts = []
    faces = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        toks = s.split()
        if toks[0] == "v":
            coords = [_number(t, lineno, path) for t in toks[1:]]
            if len(coords) == 4:  # homogeneous weight
                coords = coords[:3]
            verts.append(coords)
        elif toks[0] == "f":
            if len(toks) != 4:
                raise ParseError(f"{path}:{lineno}: only triangular faces are supported", lineno)
            tri = []
            for t in toks[1:]:
                i = _index(t.split("/")[0], lineno, path)
                i = i - 1 if i > 0 else len(verts) + i
                if not 0 <= i < len(verts):
                    raise ParseError(f"{path}:{lineno}: face references missing vertex", lineno)
                tri.append(i)
            faces.append(tri)
        # vn, vt, o, g, s, usemtl, mtllib: ignored
    if not verts:
        raise ParseError(f"{path}: no vertices")
    dims = {len(v) for v in verts}
    if len(dims) != 1:
        raise ParseError(f"{path}: vertices have inconsistent dimensions")
    return np.array(verts, dtype=float), np.array(faces, dtype=np.int64).reshape(-1, 3)


def _format_of(path, fmt):
    if fmt:
        fmt = fmt.upper()
    else:
        fmt = str(path).rsplit(".", 1)[-1].upper()
    if fmt not in ("OFF", "OBJ"):
        raise ParseError(f"{path}: unknown mesh format {fmt!r}")
    return fmt


def load_mesh(path, format=None) -> EmbeddedMesh:
    fmt = _format_of(path, format)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    verts, faces = (parse_off if fmt == "OFF" else parse_obj)(text, str(path))
    return embedded_mesh(verts, faces)


def _num(x):
    return format(float(x), ".17g")


def off_text(vertices, faces):
    out = ["OFF", f"{len(vertices)} {len(faces)} 0"]
    out += [" ".join(_num(c) for c in v) for v in vertices]
    out += ["3 " + " ".join(str(int(i)) for i in f) for f in faces]
    return "\n".join(out) + "\n"


def obj_text(vertices, faces):
    out = ["v " + " ".join(_num(c) for c in v) for v in vertices]
    out += ["f " + " ".join(str(int(i) + 1) for i in f) for f in faces]
    return "\n".join(out) + "\n"


def save_mesh(mesh: EmbeddedMesh, path, format=None):
    fmt = _format_of(path, format)
    text = (off_text if fmt == "OFF" else obj_text)(mesh.vertices, mesh.faces)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)

"""Generators for the standard test surfaces."""
import numpy as np
from scipy.spatial import ConvexHull

from .mesh import build_pl_surface, embedded_mesh


def _orient_outward(vertices, faces, center=None):
    """Flip faces of a convex (star-shaped about ``center``) mesh to point outward."""
    v = np.asarray(vertices, dtype=float)
    f = np.array(faces, dtype=np.int64)
    c = v.mean(axis=0) if center is None else np.asarray(center, dtype=float)
    n = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
    out = np.einsum("ij,ij->i", n, v[f].mean(axis=1) - c) < 0
    f[out] = f[out][:, ::-1]
    return f


def _hull_mesh(points):
    hull = ConvexHull(points)
    return embedded_mesh(points, _orient_outward(points, hull.simplices))


def cube(size=1.0):
    """Unit cube, 8 vertices and 12 triangles.

    Vertex index is ``x + 2y + 4z``.  Every square is split along the
    diagonal that avoids the corner (0,0,0) or (1,1,1) it contains, so that
    the edge graph distance between those two corners is 3.
    """
    v = np.array([[(i >> 0) & 1, (i >> 1) & 1, (i >> 2) & 1] for i in range(8)], dtype=float)
    faces = []
    for axis in range(3):
        for side in (0, 1):
            quad = [i for i in range(8) if (i >> axis) & 1 == side]
            c = 0 if 0 in quad else 7
            nbrs = [i for i in quad if bin(i ^ c).count("1") == 1]
            opp = [i for i in quad if bin(i ^ c).count("1") == 2][0]
            faces.append([c, nbrs[0], nbrs[1]])
            faces.append([nbrs[0], nbrs[1], opp])
    return embedded_mesh(v * size, _orient_outward(v, faces))


def regular_tetrahedron(edge=1.0):
    p = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    p *= edge / (2.0 * np.sqrt(2.0))
    return _hull_mesh(p)


def octahedron():
    p = np.vstack([np.eye(3), -np.eye(3)])
    return _hull_mesh(p)


def icosahedron(edge=None):
    """Regular icosahedron; circumradius 1 unless an edge length is given."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    p = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            p += [[0.0, a, b], [a, b, 0.0], [b, 0.0, a]]
    p = np.array(p)
    if edge is None:
        p /= np.linalg.norm(p[0])
    else:
        p *= edge / 2.0
    return _hull_mesh(p)


def icosphere(level=3):
    """Loop-subdivided icosahedron projected to the unit sphere (level 3: 642 vertices)."""
    base = icosahedron()
    verts = [tuple(x) for x in base.vertices]
    faces = [tuple(f) for f in base.faces]
    for _ in range(level):
        cache = {}

        def mid(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                m = (np.array(verts[a]) + np.array(verts[b])) / 2.0
                verts.append(tuple(m / np.linalg.norm(m)))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return embedded_mesh(np.array(verts), np.array(faces))


def random_sphere(n=1000, seed=0, jitter=0.05):
    """Convex hull of random points on the unit sphere, radially perturbed.

    The hull is taken before perturbation so the triangulation stays valid;
    the perturbed mesh is generally non-convex.
    """
    rng = np.random.default_rng(seed)
    p = rng.normal(size=(n, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    faces = _orient_outward(p, ConvexHull(p).simplices, center=np.zeros(3))
    p = p * (1.0 + jitter * rng.uniform(-1.0, 1.0, size=(n, 1)))
    return embedded_mesh(p, faces)


def torus(major=2.0, minor=0.7, n_major=24, n_minor=12, twist=0.0):
    """Torus of revolution; ``twist`` shifts the minor angle per major step."""
    u = 2 * np.pi * np.arange(n_major) / n_major
    w = 2 * np.pi * np.arange(n_minor) / n_minor
    verts = []
    for i, a in enumerate(u):
        for b in w:
            b = b + twist * i
            r = major + minor * np.cos(b)
            verts.append([r * np.cos(a), r * np.sin(a), minor * np.sin(b)])
    faces = []
    for i in range(n_major):
        for j in range(n_minor):
            a = i * n_minor + j
            b = ((i + 1) % n_major) * n_minor + j
            c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
            d = i * n_minor + (j + 1) % n_minor
            faces += [[a, b, c], [a, c, d]]
    m = embedded_mesh(np.array(verts), np.array(faces))
    if m.signed_volume() < 0:
        m = embedded_mesh(m.vertices, m.faces[:, ::-1])
    return m


def flat_torus_grid(k=20, size=1.0):
    """Flat torus: k x k square grid with unit sides (scaled by ``size``),
    one diagonal per square, opposite sides identified by vertex aliasing."""
    if k < 3:
        raise ValueError("flat torus grid needs k >= 3 to stay simplicial")

    def vid(i, j):
        return (i % k) * k + (j % k)

    faces = []
    lengths = {}
    for i in range(k):
        for j in range(k):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces += [[a, b, c], [a, c, d]]
            for p, q, l in ((a, b, 1.0), (b, c, 1.0), (c, d, 1.0), (d, a, 1.0), (a, c, np.sqrt(2.0))):
                lengths[(p, q)] = l * size
    return build_pl_surface(lengths, faces, n_vertices=k * k)


def flat_grid(k=4, size=1.0):
    """Planar (k+1) x (k+1) vertex grid in z = 0, diagonals (i,j)-(i+1,j+1)."""
    verts = [[i * size, j * size, 0.0] for j in range(k + 1) for i in range(k + 1)]
    faces = []
    for j in range(k):
        for i in range(k):
            a = j * (k + 1) + i
            b, c, d = a + 1, a + k + 2, a + k + 1
            faces += [[a, b, c], [a, c, d]]
    return embedded_mesh(np.array(verts), np.array(faces))


def equilateral_fan(n, edge=1.0, closed=True):
    """PL disk: ``n`` equilateral triangles around an apex (vertex 0)."""
    faces = []
    lengths = {}
    for i in range(n):
        a = 1 + i
        b = 1 + (i + 1) % n if closed else 2 + i
        faces.append([0, a, b])
        lengths[(0, a)] = lengths[(0, b)] = lengths[(a, b)] = edge
    return build_pl_surface(lengths, faces)


def single_triangle(a=1.0, b=1.0, c=1.0):
    """One face (0, 1, 2) with |12| = a, |20| = b, |01| = c."""
    return build_pl_surface({(1, 2): a, (2, 0): b, (0, 1): c}, [[0, 1, 2]])


def wedge_prism(apex_angle, length=1.0, height=1.0):
    """Triangular prism over an isosceles triangle with the given apex angle.

    The dihedral angle along the apex edge (the z axis) equals ``apex_angle``.
    """
    h = apex_angle / 2.0
    base = np.array([[0.0, 0.0], [length * np.cos(h), length * np.sin(h)],
                     [length * np.cos(h), -length * np.sin(h)]])
    v = np.vstack([np.column_stack([base, np.zeros(3)]), np.column_stack([base, np.full(3, height)])])
    faces = [[0, 1, 2], [3, 4, 5]]
    for a in range(3):
        b = (a + 1) % 3
        faces += [[a, b, b + 3], [a, b + 3, a + 3]]
    return embedded_mesh(v, _orient_outward(v, faces))


def annulus_sector(angle, r_in=1.0, r_out=2.0, n_r=4, n_phi=16):
    """Planar annular sector 0 <= phi <= angle, as a 2D mesh."""
    rs = np.linspace(r_in, r_out, n_r + 1)
    ps = np.linspace(0.0, angle, n_phi + 1)
    verts = [[r * np.cos(p), r * np.sin(p)] for r in rs for p in ps]
    faces = []
    for i in range(n_r):
        for j in range(n_phi):
            a = i * (n_phi + 1) + j
            b, c, d = a + 1, a + n_phi + 2, a + n_phi + 1
            faces += [[a, b, c], [a, c, d]]
    return embedded_mesh(np.array(verts), np.array(faces))

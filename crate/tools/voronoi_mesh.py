#!/usr/bin/env python3
"""Generate polymesh files of the unit cube.

    voronoi_mesh.py voronoi N SEED OUT   clipped Voronoi mesh from N random seeds
    voronoi_mesh.py kuhn N OUT           n^3 cubes split into 6 tetrahedra each

Voronoi cells are clipped to the cube by mirroring the seeds across its six
sides. Lloyd sweeps keep the cells reasonably shaped.
"""

import sys

import numpy as np
from scipy.spatial import ConvexHull, Voronoi

SIDES = ["xmin", "xmax", "ymin", "ymax", "zmin", "zmax"]


def mirrored(seeds):
    pts = [seeds]
    for axis in range(3):
        for value in (0.0, 1.0):
            m = seeds.copy()
            m[:, axis] = 2.0 * value - m[:, axis]
            pts.append(m)
    return np.vstack(pts)


def cell_centroid(points):
    hull = ConvexHull(points)
    c0 = points.mean(axis=0)
    vol = 0.0
    acc = np.zeros(3)
    for s in hull.simplices:
        a, b, c = points[s]
        v = abs(np.dot(a - c0, np.cross(b - c0, c - c0))) / 6.0
        vol += v
        acc += v * (a + b + c + c0) / 4.0
    return acc / vol


def lloyd(seeds, sweeps):
    n = len(seeds)
    for _ in range(sweeps):
        vor = Voronoi(mirrored(seeds))
        new = np.empty_like(seeds)
        for i in range(n):
            region = vor.regions[vor.point_region[i]]
            new[i] = cell_centroid(vor.vertices[region])
        seeds = np.clip(new, 1e-3, 1.0 - 1e-3)
    return seeds


def order_loop(points, idx):
    p = points[idx]
    c = p.mean(axis=0)
    normal = np.cross(p[1] - p[0], p[2] - p[0])
    for k in range(2, len(p)):
        cand = np.cross(p[1] - p[0], p[k] - p[0])
        if np.linalg.norm(cand) > np.linalg.norm(normal):
            normal = cand
    normal /= np.linalg.norm(normal)
    e1 = p[0] - c
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    ang = np.arctan2((p - c) @ e2, (p - c) @ e1)
    return [idx[k] for k in np.argsort(ang)]


def voronoi(n, seed):
    rng = np.random.default_rng(seed)
    seeds = lloyd(rng.uniform(0.05, 0.95, size=(n, 3)), 30)
    vor = Voronoi(mirrored(seeds))

    # merge coincident Voronoi vertices
    key = {}
    remap = {}
    verts = []
    for i, v in enumerate(vor.vertices):
        v = np.clip(v, 0.0, 1.0)
        v[np.abs(v) < 1e-12] = 0.0
        v[np.abs(v - 1.0) < 1e-12] = 1.0
        k = tuple(np.round(v, 9))
        if k not in key:
            key[k] = len(verts)
            verts.append(v)
        remap[i] = key[k]
    verts = np.array(verts)

    faces = []
    boundary = []
    cells = [[] for _ in range(n)]
    for (a, b), ridge in zip(vor.ridge_points, vor.ridge_vertices):
        if a >= n and b >= n:
            continue
        if -1 in ridge:
            raise RuntimeError("unbounded ridge next to an interior seed")
        loop = []
        for r in ridge:
            if remap[r] not in loop:
                loop.append(remap[r])
        if len(loop) < 3:
            continue
        loop = order_loop(verts, loop)
        f = len(faces)
        faces.append(loop)
        for s in (a, b):
            if s < n:
                cells[s].append(f)
        if a >= n or b >= n:
            mirror = max(a, b) // n - 1
            boundary.append((f, SIDES[mirror]))
    return compact(verts, faces, cells, boundary)


def compact(verts, faces, cells, boundary):
    used = sorted({v for f in faces for v in f})
    new = {v: i for i, v in enumerate(used)}
    faces = [[new[v] for v in f] for f in faces]
    return verts[used], faces, cells, boundary


def kuhn(n):
    h = 1.0 / n
    idx = lambda i, j, k: (i * (n + 1) + j) * (n + 1) + k
    verts = np.array(
        [[i * h, j * h, k * h] for i in range(n + 1) for j in range(n + 1) for k in range(n + 1)]
    )
    face_ids = {}
    faces = []
    cells = []
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for perm in perms:
                    cur = [i, j, k]
                    tet = [idx(*cur)]
                    for axis in perm:
                        cur[axis] += 1
                        tet.append(idx(*cur))
                    cell = []
                    for drop in range(4):
                        tri = [tet[m] for m in range(4) if m != drop]
                        key = tuple(sorted(tri))
                        if key not in face_ids:
                            face_ids[key] = len(faces)
                            faces.append(tri)
                        cell.append(face_ids[key])
                    cells.append(cell)
    count = {}
    for c in cells:
        for f in c:
            count[f] = count.get(f, 0) + 1
    boundary = []
    for f, m in count.items():
        if m == 1:
            c = verts[faces[f]].mean(axis=0)
            for axis in range(3):
                if abs(c[axis]) < 1e-12:
                    boundary.append((f, SIDES[2 * axis]))
                elif abs(c[axis] - 1.0) < 1e-12:
                    boundary.append((f, SIDES[2 * axis + 1]))
    return verts, faces, cells, sorted(boundary)


def write(path, verts, faces, cells, boundary):
    with open(path, "w") as out:
        out.write("polymesh 1\n")
        out.write(f"vertices {len(verts)}\n")
        for v in verts:
            out.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        out.write(f"faces {len(faces)}\n")
        for f in faces:
            out.write(f"{len(f)} " + " ".join(map(str, f)) + "\n")
        out.write(f"cells {len(cells)}\n")
        for c in cells:
            out.write(f"{len(c)} " + " ".join(map(str, c)) + "\n")
        out.write(f"boundary {len(boundary)}\n")
        for f, tag in boundary:
            out.write(f"{f} {tag}\n")


def main(argv):
    if len(argv) == 5 and argv[1] == "voronoi":
        write(argv[4], *voronoi(int(argv[2]), int(argv[3])))
    elif len(argv) == 4 and argv[1] == "kuhn":
        write(argv[3], *kuhn(int(argv[2])))
    else:
        sys.exit(__doc__)


if __name__ == "__main__":
    main(sys.argv)

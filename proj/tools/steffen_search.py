"""Parameter search for the embedded flexible polyhedron built by make_steffen().

Vertices: A, B, C, D, E, X1, Y1, X2, Y2. A = (-1,0,0), C = (1,0,0), D = (0,dy,0).
A half-turn about the axis (P, u) maps D->B, A->X1, C->Y1; g(x,y,z) = (-x,y,-z)
gives E = g(B), X2 = g(Y1), Y2 = g(X1). The one-parameter flex rotates D about AC.
"""
import argparse
import itertools
import sys

import numpy as np


def halfturn(p, M, u):
    u = u/np.linalg.norm(u)
    q = p - M
    return M + 2*np.dot(q,u)*u - q

def orient_faces(V,F):
    # make coherent orientation via BFS, then outward by volume sign
    F=[list(f) for f in F]
    n=len(F); done=[False]*n; done[0]=True; stack=[0]
    def edges(f): return [(f[i],f[(i+1)%3]) for i in range(3)]
    while stack:
        i=stack.pop()
        for j in range(n):
            if done[j]: continue
            ei=set(edges(F[i])); shared=[e for e in edges(F[j]) if (e[1],e[0]) in ei or e in ei]
            if not shared: continue
            e=shared[0]
            if e in ei: F[j]=F[j][::-1]
            done[j]=True; stack.append(j)
    vol=sum(np.linalg.det(V[f]) for f in F)/6
    if vol<0: F=[f[::-1] for f in F]; vol=-vol
    return F,vol

def segtri(p,q,a,b,c):
    # returns True if closed segment intersects closed triangle (float)
    n=np.cross(b-a,c-a)
    dp=np.dot(p-a,n); dq=np.dot(q-a,n)
    if dp*dq>0: return False
    if dp==dq: return False
    t=dp/(dp-dq); x=p+t*(q-p)
    s1=np.dot(np.cross(b-a,x-a),n); s2=np.dot(np.cross(c-b,x-b),n); s3=np.dot(np.cross(a-c,x-c),n)
    return (s1>=0 and s2>=0 and s3>=0) or (s1<=0 and s2<=0 and s3<=0)

def pt_tri_dist(p,a,b,c):
    # brute: project, else edges
    n=np.cross(b-a,c-a); nn=np.dot(n,n)
    x=p-np.dot(p-a,n)/nn*n
    s1=np.dot(np.cross(b-a,x-a),n); s2=np.dot(np.cross(c-b,x-b),n); s3=np.dot(np.cross(a-c,x-c),n)
    if s1>=0 and s2>=0 and s3>=0: return abs(np.dot(p-a,n))/np.sqrt(nn)
    return min(pt_seg(p,a,b),pt_seg(p,b,c),pt_seg(p,c,a))
def pt_seg(p,a,b):
    t=np.clip(np.dot(p-a,b-a)/np.dot(b-a,b-a),0,1); return np.linalg.norm(p-a-t*(b-a))
def seg_seg(p,q,r,s):
    # sampled approx fine for search
    best=1e9
    d1=q-p; d2=s-r; a=np.dot(d1,d1); e=np.dot(d2,d2); f=np.dot(d2,p-r)
    c=np.dot(d1,p-r); b=np.dot(d1,d2); den=a*e-b*b
    sN = np.clip((b*f-c*e)/den,0,1) if den>1e-14 else 0
    tN=(b*sN+f)/e
    if tN<0: tN=0; sN=np.clip(-c/a,0,1)
    elif tN>1: tN=1; sN=np.clip((b-c)/a,0,1)
    return np.linalg.norm(p+sN*d1-(r+tN*d2))
def seg_tri_dist(p,q,a,b,c):
    if segtri(p,q,a,b,c): return 0.0
    return min(pt_tri_dist(p,a,b,c),pt_tri_dist(q,a,b,c),seg_seg(p,q,a,b),seg_seg(p,q,b,c),seg_seg(p,q,c,a))
def tri_tri_dist(T1,T2):
    return min(min(seg_tri_dist(T1[i],T1[(i+1)%3],*T2) for i in range(3)),
               min(seg_tri_dist(T2[i],T2[(i+1)%3],*T1) for i in range(3)))

def clearance(V,F):
    """min over pairs of a clearance measure; <=0 means intersecting"""
    worst=1e9
    for i,j in itertools.combinations(range(len(F)),2):
        fi,fj=F[i],F[j]; sh=set(fi)&set(fj)
        if len(sh)==0:
            d=tri_tri_dist(V[fi],V[fj])
        elif len(sh)==1:
            v=sh.pop(); oi=[x for x in fi if x!=v]; oj=[x for x in fj if x!=v]
            d=min(seg_tri_dist(V[oi[0]],V[oi[1]],*V[fj]), seg_tri_dist(V[oj[0]],V[oj[1]],*V[fi]))
        else:
            continue
        worst=min(worst,d)
    return worst

def dihedrals(V,F):
    out={}
    for f in F:
        for k in range(3):
            e=(f[k],f[(k+1)%3]); out.setdefault(tuple(sorted(e)),[]).append((f,e))
    res={}
    for key,lst in out.items():
        (f1,e1),(f2,e2)=lst
        p,q=V[e1[0]],V[e1[1]]
        def nrm(f): n=np.cross(V[f[1]]-V[f[0]],V[f[2]]-V[f[0]]); return n/np.linalg.norm(n)
        def inward(f):
            o=[x for x in f if x not in e1][0]; t=(q-p)/np.linalg.norm(q-p); w=V[o]-p; w=w-np.dot(w,t)*t; return w/np.linalg.norm(w)
        u1,u2,n1=inward(f1),inward(f2),nrm(f1)
        phi=np.arctan2(-np.dot(u2,n1),np.dot(u2,u1)) % (2*np.pi)
        res[key]=phi
    return res

def trilat(P1,P2,P3,r1,r2,r3,guess):
    ex=(P2-P1); d=np.linalg.norm(ex); ex/=d
    i=np.dot(ex,P3-P1); ey=P3-P1-i*ex; ey/=np.linalg.norm(ey); ez=np.cross(ex,ey)
    j=np.dot(ey,P3-P1)
    x=(r1*r1-r2*r2+d*d)/(2*d); y=(r1*r1-r3*r3+i*i+j*j)/(2*j)-i/j*x
    z2=r1*r1-x*x-y*y
    if z2<0: return None
    z=np.sqrt(z2)
    s1=P1+x*ex+y*ey+z*ez; s2=P1+x*ex+y*ey-z*ez
    return s1 if np.linalg.norm(s1-guess)<np.linalg.norm(s2-guess) else s2

def rot_about(p,a,c,th):
    k=(c-a)/np.linalg.norm(c-a); v=p-a
    return a+v*np.cos(th)+np.cross(k,v)*np.sin(th)+k*np.dot(k,v)*(1-np.cos(th))

def flex_state(V0,th,prev=None):
    V=V0.copy() if prev is None else prev.copy()
    A,B,C,E=V0[0],V0[1],V0[2],V0[4]
    D=rot_about(V0[3],A,C,th)
    L=lambda i,j: np.linalg.norm(V0[i]-V0[j])
    g=V if prev is not None else V0
    X1=trilat(C,B,D,L(5,2),L(5,1),L(5,3),g[5]); Y1=trilat(A,B,D,L(6,0),L(6,1),L(6,3),g[6])
    X2=trilat(C,D,E,L(7,2),L(7,3),L(7,4),g[7]); Y2=trilat(A,D,E,L(8,0),L(8,3),L(8,4),g[8])
    if any(x is None for x in (X1,Y1,X2,Y2)): return None
    W=np.array([A,B,C,D,E,X1,Y1,X2,Y2])
    return W

g = lambda p: np.array([-p[0], p[1], -p[2]])
A = np.array([-1.0, 0, 0])
C = np.array([1.0, 0, 0])
F0 = [[0,6,1],[0,6,3],[5,2,1],[5,2,3],[5,6,1],[5,6,3],
      [0,8,3],[0,8,4],[7,2,3],[7,2,4],[7,8,3],[7,8,4],[0,1,4],[1,2,4]]


def make(q):
    dy, px, py, pz, ux, uy, uz = q
    D = np.array([0, dy, 0]); P = np.array([px, py, pz]); u = np.array([ux, uy, uz])
    B = halfturn(D, P, u); X1 = halfturn(A, P, u); Y1 = halfturn(C, P, u)
    return np.array([A, B, C, D, g(B), X1, Y1, g(Y1), g(X1)])


def score(q, th_max, steps=10):
    """Smallest facet clearance over rotations [0, th_max], over the diameter."""
    V = make(q); F, _ = orient_faces(V, F0)
    diam = max(np.linalg.norm(a - b) for a in V for b in V)
    worst = clearance(V, F); prev = None
    for k in range(1, steps + 1):
        W = flex_state(V, th_max * k / steps, prev)
        if W is None:
            return -1.0
        worst = min(worst, clearance(W, F)); prev = W
    return worst / diam


def main():
    ap = argparse.ArgumentParser(description="Search half-turn parameters for an embedded crinkled flexible polyhedron.")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=200000)
    ap.add_argument("--climb", type=int, default=300)
    ap.add_argument("--theta", type=float, default=0.15)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    best_q, best = None, 0.0
    for t in range(args.samples):
        q = np.concatenate([[rng.uniform(0.2, 3.0)], rng.normal(size=3) * 1.5, rng.normal(size=3)])
        V = make(q)
        if np.linalg.norm(V[1] - V[4]) < 0.1:
            continue
        F, _ = orient_faces(V, F0)
        if clearance(V, F) < 0.01:
            continue
        s = score(q, args.theta)
        if s > best:
            best_q, best = q, s
            print("sample", t, best, np.round(q, 4).tolist(), flush=True)
    if best_q is None:
        sys.exit("no embedded configuration found")

    q, step = np.round(best_q, 4), 0.05
    for it in range(args.climb):
        q2 = np.round(q + rng.normal(size=7) * step, 4)
        s = score(q2, args.theta)
        if s > best:
            best, q = s, q2
            print("climb", it, best, q.tolist(), flush=True)
    print("final", best, q.tolist())


if __name__ == "__main__":
    main()

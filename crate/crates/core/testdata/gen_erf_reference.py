# Reference values of erf(z) at 50 significant digits (mpmath), frozen for tests.
import mpmath as mp, random
mp.mp.dps = 50
random.seed(20261016)
pts = []
# structured: axes, diagonals, annulus 2.3..3.2, small
for r in [1e-8, 1e-3, 0.1, 0.5, 1, 2, 2.5, 3, 4, 6, 10, 20, 26]:
    for ang in [0, 0.1, 0.4, 0.7854, 1.0, 1.3, 1.5, 1.5707963267948966]:
        pts.append(mp.mpc(r*mp.cos(ang), r*mp.sin(ang)))
while len(pts) < 1600:
    r = 30*random.random()**0.7
    t = random.uniform(-mp.pi, mp.pi)
    pts.append(mp.mpc(r*mp.cos(t), r*mp.sin(t)))
while len(pts) < 2200:
    # velocity arguments alpha (x +- i/2)
    al = random.uniform(0.001, 10); x = random.uniform(-3, 3)
    pts.append(mp.mpc(al*x, al/2*random.choice([-1,1])))
with open('erf_reference.csv','w') as f:
    f.write('# re_z,im_z,re_erf,im_erf (mpmath, 50 digits)\n')
    n=0
    for z in pts:
        z = mp.mpc(float(z.real), float(z.imag))
        if abs(z) > 30: continue
        v = mp.erf(z)
        if abs(v) > 1e300: continue
        f.write('%s,%s,%s,%s\n' % (repr(float(z.real)), repr(float(z.imag)), mp.nstr(v.real, 20), mp.nstr(v.imag, 20)))
        n+=1
print(n)

# Hand computation of one attention head over two scalar tokens.
import math
t = [1.0, 2.0]
embed = [1.0, 0.5]
xs = [[embed[0] * v, embed[1] * v] for v in t]
wq = [[1, 0], [0, 1]]
wk = [[0.5, 0], [0, 1]]
wv = [[1, 1], [0, 1]]
mv = lambda W, x: [sum(W[i][j] * x[j] for j in range(2)) for i in range(2)]
q = mv(wq, xs[1])
ks = [mv(wk, x) for x in xs]
vs = [mv(wv, x) for x in xs]
s = [sum(q[i] * k[i] for i in range(2)) / math.sqrt(2) for k in ks]
e = [math.exp(v - max(s)) for v in s]
a = [v / sum(e) for v in e]
out = [a[0] * vs[0][i] + a[1] * vs[1][i] for i in range(2)]
print("attn", repr(a), "out0", repr(out[0]))

# Independent numpy reference values for the estimator unit tests.
import numpy as np
np.set_printoptions(precision=17)
A = np.array([[1.0, 1.0], [0.0, 1.0]])
Q = 0.1 * np.array([[0.25, 0.5], [0.5, 1.0]])
x = np.array([1.0, 2.0])
P = np.array([[2.0, 0.5], [0.5, 1.0]])
xp = A @ x
Pp = A @ P @ A.T + Q
print("predict x", repr(xp))
print("predict P", repr(Pp))
H = np.array([[1.0, 0.0]])
R = np.array([[0.5]])
z = np.array([3.7])
S = H @ Pp @ H.T + R
K = Pp @ H.T @ np.linalg.inv(S)
xu = xp + K @ (z - H @ xp)
Pu = (np.eye(2) - K @ H) @ Pp
print("update x", repr(xu))
print("update P", repr(Pu))

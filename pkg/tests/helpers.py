import numpy as np


def central_diff(f, x, h=1e-5):
    """Central finite-difference gradient of scalar ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp.flat[i] += h
        xm.flat[i] -= h
        g.flat[i] = (f(xp) - f(xm)) / (2 * h)
    return g


def rel_err(a, b):
    """Max-norm relative error, ``inf`` norm of the difference over the larger norm."""
    a, b = np.ravel(a), np.ravel(b)
    scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(a - b)) / scale)


def model_fd_check(model, X, y, loss="logistic", h=1e-5):
    """Compare backprop gradients of the mean loss with central differences.

    Returns one relative error per parameter block.
    """
    from monolat.trainer import batch_loss_and_grads, loss_and_grad

    _, grads, _ = batch_loss_and_grads(model, X, y, loss)
    p0 = model.get_flat_params()

    def f(p):
        model.set_flat_params(p)
        return float(np.mean(loss_and_grad(loss, model.predict(X), y)[0]))

    num = central_diff(f, p0, h)
    model.set_flat_params(p0)
    errs, pos = [], 0
    for g in grads:
        errs.append(rel_err(g, num[pos : pos + g.size]))
        pos += g.size
    return errs

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np


def plotTrajectory(traj, path, target=None, title=None):
    '''
    SVG of q(t), qd(t) and u(t) for one run, one panel each

    Args:
        traj (Trajectory): the run
        path (str): output file, written as SVG
        target (ndarray, optional): desired configuration, drawn as dashed lines in the q panel
        title (str, optional): figure title

    Returns:
        path (str): the written file
    '''
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 8))
    panels = ((traj.q, 'q [deg]', True), (traj.qd, 'qd [deg/s]', True), (traj.u, 'u [N m]', False))
    for ax, (values, label, angle) in zip(axes, panels):
        scale = np.degrees(1.0) if angle else 1.0
        for i in range(traj.n):
            ax.plot(traj.times, scale * values[:, i], label=f'{label.split()[0]}{i + 1}')
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
        ax.legend(loc='best', fontsize=8)
    if target is not None:
        for qi in np.degrees(np.asarray(target)):
            axes[0].axhline(qi, color='k', linestyle='--', linewidth=0.8)
    for kind, t in traj.events:
        for ax in axes:
            ax.axvline(t, color='r' if kind == 'Diverged' else '0.5', linestyle=':', linewidth=0.8)
    axes[-1].set_xlabel('t [s]')
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    fig.savefig(path, format='svg')
    plt.close(fig)
    return path


def plotEnvelope(runs, path, target, mark=None, title=None):
    '''
    SVG of the error norm ||q - q_d|| over seeds, one color per group

    Every run is drawn as a thin line and the pointwise median of each group
    as a thick one, on a logarithmic axis.

    Args:
        runs (dict): label -> list of Trajectory
        path (str): output file, written as SVG
        target (ndarray): desired configuration in rad
        mark (float, optional): time drawn as a vertical line, e.g. the evaluation time
        title (str, optional): figure title

    Returns:
        path (str): the written file
    '''
    fig, ax = plt.subplots(figsize=(8, 4.5))
    colors = plt.rcParams['axes.prop_cycle'].by_key()['color']
    for c, (label, trajs) in enumerate(runs.items()):
        color = colors[c % len(colors)]
        for traj in trajs:
            ax.semilogy(traj.times, np.maximum(traj.errorNorms(target), 1e-16), color=color, alpha=0.25, linewidth=0.6)
        count = min(len(traj) for traj in trajs)
        stack = np.array([traj.errorNorms(target)[:count] for traj in trajs])
        ax.semilogy(trajs[0].times[:count], np.maximum(np.median(stack, axis=0), 1e-16), color=color,
                    linewidth=2, label=f'{label} median ({len(trajs)} runs)')
    if mark is not None:
        ax.axvline(mark, color='k', linestyle=':', linewidth=0.8)
    ax.set_xlabel('t [s]')
    ax.set_ylabel('||q - q_d|| [rad]')
    ax.grid(True, which='both', alpha=0.3)
    ax.legend(loc='best')
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format='svg')
    plt.close(fig)
    return path

import numpy as np
import pytest

from ctcocr import RmsProp, TrainingError
from ctcocr.layers import (
    BatchNorm2d,
    BiLstm,
    BiLstmStack,
    Conv2d,
    Linear,
    LstmDirection,
    MaxPool2d,
    Relu,
    reverse_padded,
    zero_grads,
)

from util import fd_gradient, max_rel_err

RNG = np.random.default_rng(20240601)


def check_layer_gradients(layer, x, train=False, lengths=None, tol=1e-4):
    """FD-check input and parameter gradients of a layer."""

    def forward():
        if lengths is not None:
            return layer.forward(x, lengths, train)
        return layer.forward(x, train)

    out = forward()
    weight = RNG.normal(size=out.shape)

    def scalar_loss():
        return float((forward() * weight).sum())

    zero_grads(layer.params())
    forward()
    dx = layer.backward(weight)
    assert max_rel_err(dx, fd_gradient(scalar_loss, x)) < tol
    for p in layer.params():
        if not p.trainable:
            continue
        zero_grads(layer.params())
        forward()
        layer.backward(weight)
        assert max_rel_err(p.grad, fd_gradient(scalar_loss, p.values)) < tol, p.name


class TestGradients:
    def test_conv_3x3(self):
        check_layer_gradients(Conv2d("c", 2, 3, rng=RNG), RNG.normal(size=(2, 2, 6, 7)))

    def test_conv_2x2_valid(self):
        layer = Conv2d("c", 2, 3, kernel=(2, 2), padding=(0, 0), rng=RNG)
        check_layer_gradients(layer, RNG.normal(size=(2, 2, 5, 6)))

    def test_conv_no_bias(self):
        check_layer_gradients(Conv2d("c", 1, 2, bias=False, rng=RNG),
                              RNG.normal(size=(2, 1, 5, 6)))

    def test_maxpool_square(self):
        check_layer_gradients(MaxPool2d((2, 2)), RNG.normal(size=(2, 2, 6, 8)))

    def test_maxpool_rect_overlapping(self):
        layer = MaxPool2d((2, 2), stride=(2, 1), padding=(0, 1))
        check_layer_gradients(layer, RNG.normal(size=(2, 2, 6, 7)))

    def test_relu(self):
        check_layer_gradients(Relu(), RNG.normal(size=(3, 2, 4, 5)))

    def test_batchnorm_train_mode(self):
        check_layer_gradients(BatchNorm2d("bn", 3), RNG.normal(size=(4, 3, 5, 6)), train=True)

    def test_batchnorm_eval_mode(self):
        bn = BatchNorm2d("bn", 3)
        bn.running_mean.values[:] = RNG.normal(size=3)
        bn.running_var.values[:] = RNG.uniform(0.5, 2.0, size=3)
        check_layer_gradients(bn, RNG.normal(size=(4, 3, 5, 6)))

    def test_linear(self):
        check_layer_gradients(Linear("l", 5, 4, rng=RNG), RNG.normal(size=(2, 3, 5)))

    def test_lstm_direction(self):
        check_layer_gradients(LstmDirection("ls", 4, 3, rng=RNG), RNG.normal(size=(2, 5, 4)))

    def test_bilstm_ragged_lengths(self):
        layer = BiLstm("bl", 4, 3, rng=RNG)
        check_layer_gradients(layer, RNG.normal(size=(3, 5, 4)),
                              lengths=np.array([5, 3, 1]))

    def test_bilstm_stack(self):
        layer = BiLstmStack("st", 3, 2, 2, rng=RNG)
        check_layer_gradients(layer, RNG.normal(size=(2, 4, 3)), lengths=np.array([4, 2]))


class TestLstmBehavior:
    def test_zero_weights_give_zero_output(self):
        lstm = LstmDirection("z", 4, 3, rng=RNG)
        for p in lstm.params():
            p.values[...] = 0.0
        out = lstm.forward(RNG.normal(size=(2, 6, 4)))
        assert np.all(out == 0.0)

    def test_bilstm_output_shape(self):
        layer = BiLstm("b", 10, 256, rng=RNG)
        out = layer.forward(RNG.normal(size=(1, 1, 10)))
        assert out.shape == (1, 1, 512)

    def test_forget_gate_bias_initialized_to_one(self):
        lstm = LstmDirection("f", 4, 3, rng=RNG)
        assert np.all(lstm.b.values[3:6] == 1.0)
        assert np.all(lstm.b.values[:3] == 0.0)

    def test_masked_backward_direction_ignores_padding(self):
        # backward-direction outputs for a short sample must not depend on
        # what sits in the padded frames
        layer = BiLstm("m", 3, 2, rng=RNG)
        lengths = np.array([5, 3])
        x = RNG.normal(size=(2, 5, 3))
        out1 = layer.forward(x, lengths)
        x2 = x.copy()
        x2[1, 3:] = 123.0
        out2 = layer.forward(x2, lengths)
        assert np.allclose(out1[1, :3], out2[1, :3])


def test_reverse_padded_is_involution():
    x = RNG.normal(size=(3, 6, 2))
    lengths = np.array([6, 4, 1])
    assert np.array_equal(reverse_padded(reverse_padded(x, lengths), lengths), x)


class TestRmsProp:
    def test_zero_gradient_keeps_parameters(self):
        lin = Linear("l", 3, 2, rng=RNG)
        before = lin.w.values.copy()
        zero_grads(lin.params())
        RmsProp(lin.params(), lr=0.1).step()
        assert np.array_equal(lin.w.values, before)

    def test_lr_zero_updates_v_not_params(self):
        lin = Linear("l", 3, 2, rng=RNG)
        opt = RmsProp(lin.params(), lr=0.0)
        before = lin.w.values.copy()
        lin.w.grad[...] = 1.0
        opt.step()
        opt.step()
        assert np.array_equal(lin.w.values, before)
        assert np.all(opt.v["l.w"] > 0.0)

    def test_update_formula(self):
        lin = Linear("l", 1, 1, rng=RNG)
        lin.w.values[...] = 0.0
        opt = RmsProp(lin.params(), lr=0.5, alpha=0.9, eps=1e-8)
        lin.w.grad[...] = 2.0
        opt.step()
        v = 0.1 * 4.0
        expected = -0.5 * 2.0 / (np.sqrt(v) + 1e-8)
        assert lin.w.values[0, 0] == pytest.approx(expected)

    def test_non_finite_gradient_aborts_step(self):
        lin = Linear("l", 2, 2, rng=RNG)
        before = lin.w.values.copy()
        lin.w.grad[...] = np.nan
        with pytest.raises(TrainingError):
            RmsProp(lin.params(), lr=0.1).step()
        assert np.array_equal(lin.w.values, before)

    def test_non_trainable_params_excluded(self):
        bn = BatchNorm2d("bn", 2)
        opt = RmsProp(bn.params(), lr=0.1)
        assert set(opt.v) == {"bn.gamma", "bn.beta"}

/**
 * Image decoding and preprocessing: file -> float tensor in [0, 1],
 * plain bilinear resize to the model resolution, per-channel
 * normalization, and horizontal flip for the TTA view.
 */

import { readFileSync } from 'fs'
import { extname } from 'path'

import * as tf from '@tensorflow/tfjs'
import * as jpeg from 'jpeg-js'
import { PNG } from 'pngjs'

export interface DecodedImage {
  width: number
  height: number
  /** RGB float samples in [0, 1], length width * height * 3. */
  data: Float32Array
}

export function decodeImageFile(path: string): DecodedImage {
  const buffer = readFileSync(path)
  const ext = extname(path).toLowerCase()
  if (ext === '.png') {
    const png = PNG.sync.read(buffer)
    return rgbaToFloatRgb(png.data, png.width, png.height)
  }
  if (ext === '.jpg' || ext === '.jpeg') {
    const raw = jpeg.decode(buffer, { useTArray: true })
    return rgbaToFloatRgb(raw.data, raw.width, raw.height)
  }
  throw new Error(`unsupported image format: ${path}`)
}

function rgbaToFloatRgb(
  rgba: Uint8Array | Buffer,
  width: number,
  height: number,
): DecodedImage {
  const data = new Float32Array(width * height * 3)
  let out = 0
  for (let i = 0; i < width * height * 4; i += 4) {
    data[out++] = rgba[i] / 255
    data[out++] = rgba[i + 1] / 255
    data[out++] = rgba[i + 2] / 255
  }
  return { width, height, data }
}

export function imageToTensor(image: DecodedImage): tf.Tensor3D {
  return tf.tensor3d(image.data, [image.height, image.width, 3])
}

/**
 * Resize to the model's square input and normalize channels:
 * (x - mean) / std. Returns a [1, size, size, 3] batch.
 */
export function preprocess(
  image: tf.Tensor3D,
  size: number,
  mean: [number, number, number],
  std: [number, number, number],
): tf.Tensor4D {
  return tf.tidy(() => {
    const resized = tf.image.resizeBilinear(image, [size, size], false)
    const normalized = resized.sub(tf.tensor1d(mean)).div(tf.tensor1d(std))
    return normalized.expandDims(0) as tf.Tensor4D
  })
}

/** Horizontal flip (width axis) of an HWC tensor. */
export function hflip(image: tf.Tensor3D): tf.Tensor3D {
  return tf.reverse(image, 1)
}

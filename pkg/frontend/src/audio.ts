// Single-channel speech playback: starting a clip stops the previous one.

export interface Playable {
    play(): Promise<void>
    pause(): void
}

export type AudioFactory = (url: string) => Playable

const defaultFactory: AudioFactory = url => new Audio(url)

export class AudioChannel {
    private current: Playable | null = null

    constructor(private factory: AudioFactory = defaultFactory) {}

    play(url: string, onError?: (message: string) => void): Playable {
        if (this.current !== null) {
            this.current.pause()
        }
        const clip = this.factory(url)
        this.current = clip
        clip.play().catch(() => {
            if (this.current === clip) this.current = null
            onError?.(`could not play ${url}`)
        })
        return clip
    }

    stop(): void {
        if (this.current !== null) {
            this.current.pause()
            this.current = null
        }
    }
}

export function attachTooltip(anchor: HTMLElement, message: string): void {
    anchor.title = message
    anchor.classList.add('play-failed')
}
